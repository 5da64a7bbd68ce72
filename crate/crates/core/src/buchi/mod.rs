//! Büchi automata over explicit service-set alphabets.
//!
//! Transitions are stored per source state as `(target, symbol set)` pairs;
//! a completion sink, when present, absorbs every `(state, symbol)` pair
//! with no stored successor, which keeps the automaton deadlock-free
//! without materializing the absorbed transitions.

mod tableau;
mod text;

pub use tableau::ltl_to_buchi;
pub use text::{automaton_from_text, automaton_to_text};

use crate::sym::{Alphabet, SymbolSet};
use std::collections::{BTreeSet, VecDeque};

pub type StateId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Alphabet,
    state_names: Vec<String>,
    init: StateId,
    accepting: Vec<bool>,
    /// Per source state, sorted by target id.
    edges: Vec<Vec<(StateId, SymbolSet)>>,
    /// Non-accepting absorbing state receiving all unlisted `(q, σ)` pairs.
    sink: Option<StateId>,
}

impl BuchiAutomaton {
    pub fn new(alphabet: Alphabet, state_names: Vec<String>, init: StateId) -> Self {
        let n = state_names.len();
        assert!((init as usize) < n);
        Self {
            alphabet,
            state_names,
            init,
            accepting: vec![false; n],
            edges: vec![Vec::new(); n],
            sink: None,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn sink(&self) -> Option<StateId> {
        self.sink
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q as usize]
    }

    pub fn state_named(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as StateId)
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn set_accepting(&mut self, q: StateId, yes: bool) {
        self.accepting[q as usize] = yes;
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.n_states() as StateId).filter(|&q| self.accepting[q as usize])
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.state_names.push(name.into());
        self.accepting.push(false);
        self.edges.push(Vec::new());
        (self.state_names.len() - 1) as StateId
    }

    pub fn add_transition(&mut self, src: StateId, sym: u32, dst: StateId) {
        let list = &mut self.edges[src as usize];
        match list.binary_search_by_key(&dst, |(d, _)| *d) {
            Ok(i) => list[i].1.insert(sym),
            Err(i) => {
                let mut set = SymbolSet::empty(self.alphabet.len());
                set.insert(sym);
                list.insert(i, (dst, set));
            }
        }
    }

    pub fn add_transitions(&mut self, src: StateId, syms: &SymbolSet, dst: StateId) {
        let list = &mut self.edges[src as usize];
        match list.binary_search_by_key(&dst, |(d, _)| *d) {
            Ok(i) => list[i].1.union_with(syms),
            Err(i) => list.insert(i, (dst, syms.clone())),
        }
    }

    /// Deletes the stored transitions `(src, sym, *)`. With a completion
    /// sink present this makes the pair fall through to the sink, which is
    /// exactly the effect wanted when a service combination is forbidden.
    pub fn remove_symbol_at(&mut self, src: StateId, sym: u32) {
        for (_, set) in &mut self.edges[src as usize] {
            set.remove(sym);
        }
        self.edges[src as usize].retain(|(_, set)| !set.is_empty());
    }

    /// Stored (non-sink) edges of `src`.
    pub fn edges_of(&self, src: StateId) -> &[(StateId, SymbolSet)] {
        &self.edges[src as usize]
    }

    /// True iff `(src, sym, dst)` is a transition, counting sink fallback.
    pub fn has_edge(&self, src: StateId, sym: u32, dst: StateId) -> bool {
        let list = &self.edges[src as usize];
        if let Ok(i) = list.binary_search_by_key(&dst, |(d, _)| *d) {
            if list[i].1.contains(sym) {
                return true;
            }
        }
        match self.sink {
            Some(s) if s == dst => !list.iter().any(|(_, set)| set.contains(sym)),
            _ => false,
        }
    }

    /// Calls `f` for every successor of `(src, sym)`, sink included.
    pub fn for_each_successor(&self, src: StateId, sym: u32, mut f: impl FnMut(StateId)) {
        let mut any = false;
        for (dst, set) in &self.edges[src as usize] {
            if set.contains(sym) {
                any = true;
                f(*dst);
            }
        }
        if !any {
            if let Some(s) = self.sink {
                f(s);
            }
        }
    }

    pub fn successors(&self, src: StateId, sym: u32) -> Vec<StateId> {
        let mut out = Vec::new();
        self.for_each_successor(src, sym, |d| out.push(d));
        out
    }

    /// True iff every `(q, σ)` pair has at least one successor.
    pub fn is_deadlock_free(&self) -> bool {
        if self.sink.is_some() {
            return true;
        }
        let n_props = self.alphabet.len();
        (0..self.n_states()).all(|q| {
            let mut covered = SymbolSet::empty(n_props);
            for (_, set) in &self.edges[q] {
                covered.union_with(set);
            }
            covered.is_full()
        })
    }

    /// Adds one non-accepting absorbing sink for all missing `(q, σ)` pairs.
    /// Already deadlock-free automata are returned unchanged; the language
    /// is preserved either way.
    pub fn complete_deadlock_free(mut self) -> Self {
        if self.is_deadlock_free() {
            return self;
        }
        let sink = self.add_state("sink");
        self.sink = Some(sink);
        self
    }

    /// States reachable from `q` in exactly `k` transitions.
    pub fn reachable_k(&self, q: StateId, k: usize) -> BTreeSet<StateId> {
        let mut cur: BTreeSet<StateId> = BTreeSet::from([q]);
        for _ in 0..k {
            let mut next = BTreeSet::new();
            for &s in &cur {
                for (dst, set) in &self.edges[s as usize] {
                    if !set.is_empty() {
                        next.insert(*dst);
                    }
                }
                if let Some(sink) = self.sink {
                    // The sink is a successor of s iff some symbol has no
                    // stored successor from s.
                    let mut covered = SymbolSet::empty(self.alphabet.len());
                    for (_, set) in &self.edges[s as usize] {
                        covered.union_with(set);
                    }
                    if !covered.is_full() {
                        next.insert(sink);
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Successor states of `q` under any symbol.
    pub fn successor_states(&self, q: StateId) -> BTreeSet<StateId> {
        self.reachable_k(q, 1)
    }

    /// Length (in transitions) of the shortest path from `q` to `q2`;
    /// `None` when unreachable, `Some(0)` when equal.
    pub fn dist(&self, q: StateId, q2: StateId) -> Option<usize> {
        if q == q2 {
            return Some(0);
        }
        let mut seen = vec![false; self.n_states()];
        seen[q as usize] = true;
        let mut queue = VecDeque::from([(q, 0usize)]);
        while let Some((s, d)) = queue.pop_front() {
            for t in self.successor_states(s) {
                if t == q2 {
                    return Some(d + 1);
                }
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back((t, d + 1));
                }
            }
        }
        None
    }

    /// Decides whether some run over `prefix · period^ω` visits an
    /// accepting state infinitely often.
    pub fn accepts_lasso(&self, prefix: &[u32], period: &[u32]) -> bool {
        assert!(!period.is_empty(), "lasso period must be nonempty");
        let n_pos = prefix.len() + period.len();
        let next_pos = |i: usize| if i + 1 < n_pos { i + 1 } else { prefix.len() };
        let sym_at = |i: usize| {
            if i < prefix.len() {
                prefix[i]
            } else {
                period[i - prefix.len()]
            }
        };
        let node = |q: StateId, i: usize| q as usize * n_pos + i;

        // Forward reachability in the automaton × lasso product.
        let mut reach = vec![false; self.n_states() * n_pos];
        let mut queue = VecDeque::from([(self.init, 0usize)]);
        reach[node(self.init, 0)] = true;
        let mut acc_nodes = Vec::new();
        while let Some((q, i)) = queue.pop_front() {
            if self.is_accepting(q) && i >= prefix.len() {
                acc_nodes.push((q, i));
            }
            let j = next_pos(i);
            self.for_each_successor(q, sym_at(i), |t| {
                if !reach[node(t, j)] {
                    reach[node(t, j)] = true;
                    queue.push_back((t, j));
                }
            });
        }

        // Accepting iff some reachable accepting node lies on a cycle.
        for &(q0, i0) in &acc_nodes {
            let mut seen = vec![false; self.n_states() * n_pos];
            let mut queue = VecDeque::from([(q0, i0)]);
            while let Some((q, i)) = queue.pop_front() {
                let j = next_pos(i);
                let mut found = false;
                self.for_each_successor(q, sym_at(i), |t| {
                    if (t, j) == (q0, i0) {
                        found = true;
                    }
                    if !seen[node(t, j)] {
                        seen[node(t, j)] = true;
                        queue.push_back((t, j));
                    }
                });
                if found {
                    return true;
                }
            }
        }
        false
    }

    /// Per-state flag: the ω-language from this state is nonempty, i.e.
    /// an accepting cycle is reachable. Used for prefix verdicts.
    pub fn nonempty_language_states(&self) -> Vec<bool> {
        let n = self.n_states();
        // on_cycle[q]: q lies on some cycle through an accepting state.
        let mut seed = vec![false; n];
        for q in self.accepting_states() {
            // BFS from q's successors back to q.
            let mut seen = vec![false; n];
            let mut queue: VecDeque<StateId> = self.successor_states(q).into_iter().collect();
            let mut hit = queue.iter().any(|&t| t == q);
            for &t in &queue {
                seen[t as usize] = true;
            }
            while let Some(s) = queue.pop_front() {
                if hit {
                    break;
                }
                for t in self.successor_states(s) {
                    if t == q {
                        hit = true;
                    }
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        queue.push_back(t);
                    }
                }
            }
            if hit {
                seed[q as usize] = true;
            }
        }
        // Backward closure: states that can reach a seeded state.
        let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n as StateId {
            for t in self.successor_states(q) {
                pred[t as usize].push(q);
            }
        }
        let mut good = seed.clone();
        let mut queue: VecDeque<StateId> = (0..n as StateId)
            .filter(|&q| seed[q as usize])
            .collect();
        while let Some(q) = queue.pop_front() {
            for &p in &pred[q as usize] {
                if !good[p as usize] {
                    good[p as usize] = true;
                    queue.push_back(p);
                }
            }
        }
        good
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::sym::{Alphabet, DEFAULT_ALPHABET_CAP};

    /// Four-state specification automaton over {a,b,c} used across tests:
    /// q1 -{a,b},{a,b,c}-> q2; q2 -{a}-> q3; q2 -{a,c}-> q4;
    /// q3 loops on {}; q4 loops on {},{b},{c},{b,c}; q3 accepting.
    pub fn spec_over_abc() -> BuchiAutomaton {
        let alphabet =
            Alphabet::new(vec!["a".into(), "b".into(), "c".into()], DEFAULT_ALPHABET_CAP).unwrap();
        let names = vec!["q1".into(), "q2".into(), "q3".into(), "q4".into()];
        let mut b = BuchiAutomaton::new(alphabet, names, 0);
        let (a, bb, c) = (1u32, 2u32, 4u32);
        b.add_transition(0, a | bb, 1);
        b.add_transition(0, a | bb | c, 1);
        b.add_transition(1, a, 2);
        b.add_transition(1, a | c, 3);
        b.add_transition(2, 0, 2);
        for sym in [0, bb, c, bb | c] {
            b.add_transition(3, sym, 3);
        }
        b.set_accepting(2, true);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::spec_over_abc;
    use super::*;
    use crate::sym::{Alphabet, DEFAULT_ALPHABET_CAP};

    #[test]
    fn reachable_zero_is_self() {
        let b = spec_over_abc();
        assert_eq!(b.reachable_k(0, 0), BTreeSet::from([0]));
    }

    #[test]
    fn reachable_sets_match_structure() {
        let b = spec_over_abc();
        assert_eq!(b.reachable_k(0, 1), BTreeSet::from([1]));
        assert_eq!(b.reachable_k(0, 2), BTreeSet::from([2, 3]));
    }

    #[test]
    fn reachable_recurrence() {
        let b = spec_over_abc();
        for q in 0..b.n_states() as StateId {
            for k in 0..4 {
                let stepwise: BTreeSet<StateId> = b
                    .reachable_k(q, k)
                    .into_iter()
                    .flat_map(|s| b.successor_states(s))
                    .collect();
                assert_eq!(stepwise, b.reachable_k(q, k + 1));
            }
        }
    }

    #[test]
    fn dist_basics() {
        let b = spec_over_abc();
        assert_eq!(b.dist(0, 0), Some(0));
        assert_eq!(b.dist(0, 2), Some(2));
        assert_eq!(b.dist(3, 2), None);
    }

    #[test]
    fn dist_bounded_by_membership_in_reachable_k() {
        let b = spec_over_abc();
        for q in 0..b.n_states() as StateId {
            for k in 0..4usize {
                for t in b.reachable_k(q, k) {
                    assert!(b.dist(q, t).expect("reachable") <= k);
                }
            }
        }
    }

    #[test]
    fn completion_adds_single_sink_and_routes_missing_pairs() {
        let b = spec_over_abc();
        assert!(!b.is_deadlock_free());
        let n = b.n_states();
        let c = b.complete_deadlock_free();
        assert_eq!(c.n_states(), n + 1);
        assert!(c.is_deadlock_free());
        let sink = c.sink().unwrap();
        assert!(!c.is_accepting(sink));
        // q3 kept only its {} loop; everything else goes to the sink.
        let q3 = c.state_named("q3").unwrap();
        assert!(c.has_edge(q3, 0, q3));
        for sym in 1..8u32 {
            assert!(c.has_edge(q3, sym, sink));
            assert!(!c.has_edge(q3, sym, q3));
        }
    }

    #[test]
    fn completion_is_identity_on_complete_automata() {
        let alphabet = Alphabet::new(vec!["a".into()], DEFAULT_ALPHABET_CAP).unwrap();
        let mut b = BuchiAutomaton::new(alphabet, vec!["q0".into()], 0);
        b.add_transition(0, 0, 0);
        b.add_transition(0, 1, 0);
        b.set_accepting(0, true);
        let before = b.clone();
        let after = b.complete_deadlock_free();
        assert_eq!(before, after);
    }

    #[test]
    fn lasso_acceptance_on_fixture() {
        // The fixture accepts words reaching q3 (then {} forever).
        let b = spec_over_abc();
        let (a, bb, c) = (1u32, 2u32, 4u32);
        assert!(b.accepts_lasso(&[a | bb, a], &[0]));
        assert!(b.accepts_lasso(&[a | bb | c, a], &[0]));
        // Going to q4 never accepts.
        assert!(!b.accepts_lasso(&[a | bb, a | c], &[bb]));
        // Staying nowhere: no run at all.
        assert!(!b.accepts_lasso(&[c], &[0]));
    }

    #[test]
    fn completion_preserves_lasso_acceptance_on_fixture() {
        let b = spec_over_abc();
        let c = b.clone().complete_deadlock_free();
        let words: Vec<(Vec<u32>, Vec<u32>)> = vec![
            (vec![1 | 2, 1], vec![0]),
            (vec![1 | 2, 1 | 4], vec![2]),
            (vec![4], vec![0]),
            (vec![], vec![1 | 2, 1, 0]),
        ];
        for (p, l) in words {
            assert_eq!(b.accepts_lasso(&p, &l), c.accepts_lasso(&p, &l));
        }
    }

    #[test]
    fn nonempty_language_states_on_fixture() {
        let b = spec_over_abc();
        let good = b.nonempty_language_states();
        assert!(good[0] && good[1] && good[2]);
        assert!(!good[3]);
    }
}
