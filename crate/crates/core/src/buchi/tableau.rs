//! Tableau (node-expansion) translation from LTL to Büchi automata.
//!
//! The translation works on formulas in negation normal form, produces a
//! generalized acceptance condition with one set per until-subformula, and
//! degeneralizes it with a rotating counter. The result is then completed
//! to a deadlock-free automaton. No minimization is attempted.

use super::BuchiAutomaton;
use crate::ltl::Formula;
use crate::sym::{Alphabet, SymbolSet};
use std::collections::{BTreeSet, HashMap};

/// Translates an NNF formula over the given proposition list into a
/// deadlock-free Büchi automaton with `L(B) = L(f)`.
pub fn ltl_to_buchi(f: &Formula, alphabet: Alphabet) -> BuchiAutomaton {
    match f {
        // Universal and empty languages collapse to a single state.
        Formula::True => {
            let mut b = BuchiAutomaton::new(alphabet.clone(), vec!["q0".into()], 0);
            for sym in 0..alphabet.n_symbols() as u32 {
                b.add_transition(0, sym, 0);
            }
            b.set_accepting(0, true);
            return b;
        }
        Formula::False => {
            let mut b = BuchiAutomaton::new(alphabet.clone(), vec!["q0".into()], 0);
            for sym in 0..alphabet.n_symbols() as u32 {
                b.add_transition(0, sym, 0);
            }
            return b;
        }
        _ => {}
    }

    let closure = Closure::build(f, &alphabet);
    let nodes = expand_all(&closure);
    degeneralize(&closure, &nodes, alphabet).complete_deadlock_free()
}

/// Indexed subformula closure; sets of subformulas are `u128` masks.
struct Closure {
    subs: Vec<Formula>,
    index: HashMap<Formula, usize>,
    root: usize,
    /// Until-subformulas in deterministic order, as (self, rhs) indices.
    untils: Vec<(usize, usize)>,
    /// Per-atom local bit in the alphabet (indexed like `subs`).
    atom_bit: Vec<Option<u32>>,
    /// For `Not(atom)` nodes, the index of the positive atom.
    negated_atom: Vec<Option<usize>>,
}

impl Closure {
    fn build(f: &Formula, alphabet: &Alphabet) -> Self {
        let mut c = Closure {
            subs: Vec::new(),
            index: HashMap::new(),
            root: 0,
            untils: Vec::new(),
            atom_bit: Vec::new(),
            negated_atom: Vec::new(),
        };
        c.root = c.insert(f, alphabet);
        let mut untils: Vec<(usize, usize)> = Vec::new();
        for (i, g) in c.subs.iter().enumerate() {
            if let Formula::Until(_, b) = g {
                untils.push((i, c.index[b.as_ref()]));
            }
        }
        c.untils = untils;
        c
    }

    fn insert(&mut self, f: &Formula, alphabet: &Alphabet) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        // Children first so indices are usable when the parent is stored.
        let (child_a, child_b) = match f {
            Formula::Not(a) | Formula::Next(a) => (Some(self.insert(a, alphabet)), None),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => (
                Some(self.insert(a, alphabet)),
                Some(self.insert(b, alphabet)),
            ),
            Formula::Finally(_) | Formula::Globally(_) => {
                panic!("tableau input must be in negation normal form")
            }
            _ => (None, None),
        };
        let _ = (child_a, child_b);
        let i = self.subs.len();
        assert!(i < 128, "formula too large for the tableau translation");
        self.subs.push(f.clone());
        self.index.insert(f.clone(), i);
        self.atom_bit.push(match f {
            Formula::Atom(a) => Some(
                alphabet
                    .bit_of(a)
                    .unwrap_or_else(|| panic!("atom `{a}` not in alphabet")),
            ),
            _ => None,
        });
        self.negated_atom.push(match f {
            Formula::Not(a) => match a.as_ref() {
                Formula::Atom(_) => Some(self.index[a.as_ref()]),
                Formula::True | Formula::False => None,
                _ => panic!("tableau input must be in negation normal form"),
            },
            _ => None,
        });
        i
    }

    fn bit(&self, i: usize) -> u128 {
        1u128 << i
    }
}

#[derive(Debug, Clone)]
struct Node {
    incoming: BTreeSet<usize>,
    old: u128,
    next: u128,
}

/// Expands the root formula into tableau nodes. Node 0 is the virtual
/// initial node (empty `old`/`next`).
fn expand_all(c: &Closure) -> Vec<Node> {
    let mut done: Vec<Node> = vec![Node {
        incoming: BTreeSet::new(),
        old: 0,
        next: 0,
    }];
    // Candidate nodes still to be expanded: (incoming, new, old, next).
    let mut work: Vec<(BTreeSet<usize>, u128, u128, u128)> =
        vec![(BTreeSet::from([0]), c.bit(c.root), 0, 0)];

    while let Some((incoming, new, old, next)) = work.pop() {
        if new == 0 {
            // A node is identified by (old, next); re-reaching one only
            // adds incoming edges.
            if let Some(found) = done
                .iter_mut()
                .skip(1)
                .find(|n| n.old == old && n.next == next)
            {
                found.incoming.extend(incoming);
                continue;
            }
            done.push(Node {
                incoming,
                old,
                next,
            });
            let id = done.len() - 1;
            work.push((BTreeSet::from([id]), next, 0, 0));
            continue;
        }

        let i = new.trailing_zeros() as usize;
        let fbit = c.bit(i);
        let new = new & !fbit;
        match &c.subs[i] {
            Formula::True => work.push((incoming, new, old, next)),
            Formula::False => {} // contradiction: drop the node
            Formula::Atom(_) => {
                // Contradiction with a recorded negated literal?
                let clash = c
                    .negated_atom
                    .iter()
                    .enumerate()
                    .any(|(j, na)| *na == Some(i) && old & c.bit(j) != 0);
                if !clash {
                    work.push((incoming, new, old | fbit, next));
                }
            }
            Formula::Not(inner) => match inner.as_ref() {
                Formula::True => {}
                Formula::False => work.push((incoming, new, old, next)),
                Formula::Atom(_) => {
                    let pos = c.negated_atom[i].expect("indexed atom");
                    if old & c.bit(pos) == 0 {
                        work.push((incoming, new, old | fbit, next));
                    }
                }
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(a, b) => {
                let add = (c.bit(c.index[a.as_ref()]) | c.bit(c.index[b.as_ref()])) & !old;
                work.push((incoming, new | add, old | fbit, next));
            }
            Formula::Or(a, b) => {
                let (ia, ib) = (c.index[a.as_ref()], c.index[b.as_ref()]);
                work.push((
                    incoming.clone(),
                    new | (c.bit(ia) & !old),
                    old | fbit,
                    next,
                ));
                work.push((incoming, new | (c.bit(ib) & !old), old | fbit, next));
            }
            Formula::Next(a) => {
                let ia = c.index[a.as_ref()];
                work.push((incoming, new, old | fbit, next | c.bit(ia)));
            }
            // a U b = b or (a and X(a U b))
            Formula::Until(a, b) => {
                let (ia, ib) = (c.index[a.as_ref()], c.index[b.as_ref()]);
                work.push((
                    incoming.clone(),
                    new | (c.bit(ib) & !old),
                    old | fbit,
                    next,
                ));
                work.push((incoming, new | (c.bit(ia) & !old), old | fbit, next | fbit));
            }
            // a R b = (a and b) or (b and X(a R b))
            Formula::Release(a, b) => {
                let (ia, ib) = (c.index[a.as_ref()], c.index[b.as_ref()]);
                work.push((
                    incoming.clone(),
                    new | ((c.bit(ia) | c.bit(ib)) & !old),
                    old | fbit,
                    next,
                ));
                work.push((incoming, new | (c.bit(ib) & !old), old | fbit, next | fbit));
            }
            Formula::Finally(_) | Formula::Globally(_) => {
                unreachable!("input is in negation normal form")
            }
        }
        assert!(done.len() < 50_000, "tableau expansion too large");
    }
    done
}

/// Symbols consistent with the positive/negative literals of a node.
fn node_guard(c: &Closure, node: &Node, alphabet: &Alphabet) -> SymbolSet {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for i in 0..c.subs.len() {
        if node.old & c.bit(i) == 0 {
            continue;
        }
        if let Some(bit) = c.atom_bit[i] {
            pos |= 1 << bit;
        }
        if let Some(p) = c.negated_atom[i] {
            neg |= 1 << c.atom_bit[p].expect("atom has a bit");
        }
    }
    let mut set = SymbolSet::empty(alphabet.len());
    for sym in 0..alphabet.n_symbols() as u32 {
        if sym & pos == pos && sym & neg == 0 {
            set.insert(sym);
        }
    }
    set
}

fn degeneralize(c: &Closure, nodes: &[Node], alphabet: Alphabet) -> BuchiAutomaton {
    let m = c.untils.len();
    // acc[j][node]: node belongs to the j-th acceptance set. The virtual
    // initial node is excluded throughout: no run revisits it, so leaving
    // it out preserves the language while keeping acceptance (and the
    // degeneralization counter) tied to resolved obligations.
    let acc: Vec<Vec<bool>> = c
        .untils
        .iter()
        .map(|&(u, rhs)| {
            nodes
                .iter()
                .enumerate()
                .map(|(i, n)| i != 0 && (n.old & c.bit(u) == 0 || n.old & c.bit(rhs) != 0))
                .collect()
        })
        .collect();
    let guards: Vec<SymbolSet> = nodes.iter().map(|n| node_guard(c, n, &alphabet)).collect();

    if m <= 1 {
        let names = (0..nodes.len()).map(|i| format!("n{i}")).collect();
        let mut b = BuchiAutomaton::new(alphabet, names, 0);
        for (dst, node) in nodes.iter().enumerate().skip(1) {
            for &src in &node.incoming {
                b.add_transitions(src as u32, &guards[dst], dst as u32);
            }
        }
        for (i, _) in nodes.iter().enumerate() {
            let ok = if m == 0 { true } else { acc[0][i] };
            b.set_accepting(i as u32, ok);
        }
        // The virtual initial node has no incoming edges, so no run can
        // revisit it; dropping it from the accepting set preserves the
        // language and keeps acceptance tied to actual progress.
        b.set_accepting(0, false);
        return b;
    }

    // Rotating-counter degeneralization over reachable (node, counter)
    // pairs; the counter advances when the source lies in its current set.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (dst, node) in nodes.iter().enumerate().skip(1) {
        for &src in &node.incoming {
            succ[src].push(dst);
        }
    }
    let mut b = BuchiAutomaton::new(alphabet, vec!["n0k1".into()], 0);
    let mut index: HashMap<(usize, usize), u32> = HashMap::from([((0usize, 1usize), 0u32)]);
    let mut queue = vec![(0usize, 1usize)];
    while let Some((node, k)) = queue.pop() {
        let src = index[&(node, k)];
        let k2 = if acc[k - 1][node] { k % m + 1 } else { k };
        for &dst in &succ[node] {
            let id = *index.entry((dst, k2)).or_insert_with(|| {
                let id = b.add_state(format!("n{dst}k{k2}"));
                queue.push((dst, k2));
                id
            });
            b.add_transitions(src, &guards[dst], id);
        }
    }
    for ((node, k), id) in &index {
        b.set_accepting(*id, *k == m && acc[m - 1][*node]);
    }
    b.set_accepting(0, false);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval_lasso, parse_ltl};
    use crate::sym::DEFAULT_ALPHABET_CAP;
    use std::collections::BTreeSet;

    fn alphabet(names: &[&str]) -> Alphabet {
        Alphabet::new(
            names.iter().map(|s| s.to_string()).collect(),
            DEFAULT_ALPHABET_CAP,
        )
        .unwrap()
    }

    fn compile(text: &str, names: &[&str]) -> BuchiAutomaton {
        let set: BTreeSet<String> = names.iter().map(|s| s.to_string()).collect();
        let f = parse_ltl(text, &set).unwrap().to_nnf();
        ltl_to_buchi(&f, alphabet(names))
    }

    #[test]
    fn true_yields_single_accepting_loop() {
        let b = ltl_to_buchi(&Formula::True, alphabet(&["a", "b"]));
        assert_eq!(b.n_states(), 1);
        assert!(b.is_accepting(0));
        for sym in 0..4 {
            assert!(b.has_edge(0, sym, 0));
        }
        assert!(b.accepts_lasso(&[], &[0]));
    }

    #[test]
    fn false_rejects_everything() {
        let b = ltl_to_buchi(&Formula::False, alphabet(&["a"]));
        assert!(!b.accepts_lasso(&[], &[0]));
        assert!(!b.accepts_lasso(&[1], &[1]));
    }

    #[test]
    fn conjunction_with_next_accepts_expected_lassos() {
        let b = compile("a & X (a & b)", &["a", "b"]);
        assert!(b.is_deadlock_free());
        assert!(b.accepts_lasso(&[0b01, 0b11], &[0]));
        assert!(!b.accepts_lasso(&[0b10, 0b10, 0b11], &[0]));
    }

    #[test]
    fn recurrence_formula_matches_semantic_evaluator_on_random_lassos() {
        let names = ["a"];
        let set: BTreeSet<String> = names.iter().map(|s| s.to_string()).collect();
        let f = parse_ltl("G F a", &set).unwrap();
        let b = ltl_to_buchi(&f.to_nnf(), alphabet(&names));
        let alpha: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        // Deterministic sweep over small lassos stands in for sampling.
        let mut checked = 0;
        for plen in 0..4usize {
            for llen in 1..4usize {
                for code in 0..1u32 << (plen + llen) {
                    let bits: Vec<u32> = (0..plen + llen).map(|i| (code >> i) & 1).collect();
                    let (p, l) = bits.split_at(plen);
                    let want = eval_lasso(&f, &alpha, p, l);
                    assert_eq!(b.accepts_lasso(p, l), want, "prefix {p:?} loop {l:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 200);
    }

    #[test]
    fn until_release_and_nested_next_agree_with_evaluator() {
        let names = ["a", "b"];
        let alpha: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let set: BTreeSet<String> = alpha.iter().cloned().collect();
        for text in [
            "a U b",
            "!(a U b)",
            "G (a | b)",
            "F (a & X b)",
            "G F a & G F b",
            "a U (b U a)",
            "X X a",
        ] {
            let f = parse_ltl(text, &set).unwrap();
            let b = ltl_to_buchi(&f.to_nnf(), alphabet(&names));
            for plen in 0..3usize {
                for llen in 1..3usize {
                    for code in 0..1u32 << (2 * (plen + llen)) {
                        let syms: Vec<u32> =
                            (0..plen + llen).map(|i| (code >> (2 * i)) & 0b11).collect();
                        let (p, l) = syms.split_at(plen);
                        assert_eq!(
                            b.accepts_lasso(p, l),
                            eval_lasso(&f, &alpha, p, l),
                            "{text} on prefix {p:?} loop {l:?}"
                        );
                    }
                }
            }
        }
    }
}
