//! Direct LTL semantics on ultimately periodic words.
//!
//! `eval_lasso` decides `prefix · period^ω ⊨ φ` by a state-formula fixpoint
//! over the finitely many distinct word positions. It shares no code with
//! the automaton translation and serves as an independent reference for it.

use super::Formula;

/// Evaluates `f` on the word `prefix · period^ω`.
///
/// Symbols are masks over `alphabet` (bit `i` set means `alphabet[i]` holds).
/// `period` must be nonempty.
pub fn eval_lasso(f: &Formula, alphabet: &[String], prefix: &[u32], period: &[u32]) -> bool {
    assert!(!period.is_empty(), "lasso period must be nonempty");
    let n = prefix.len() + period.len();
    let next = |i: usize| -> usize {
        if i + 1 < n {
            i + 1
        } else {
            prefix.len()
        }
    };
    let sym = |i: usize| -> u32 {
        if i < prefix.len() {
            prefix[i]
        } else {
            period[i - prefix.len()]
        }
    };

    // Post-order list of subformulas so children are evaluated first.
    let mut nodes: Vec<&Formula> = Vec::new();
    fn collect<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(a) | Formula::Next(a) | Formula::Finally(a) | Formula::Globally(a) => {
                collect(a, out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                collect(a, out);
                collect(b, out);
            }
        }
        out.push(f);
    }
    collect(f, &mut nodes);

    let mut sat: Vec<Vec<bool>> = Vec::with_capacity(nodes.len());
    let idx_of = |nodes: &[&Formula], want: &Formula| -> usize {
        // Subformulas repeat; any prior occurrence has identical truth values.
        nodes
            .iter()
            .position(|&g| std::ptr::eq(g, want))
            .expect("child evaluated before parent")
    };

    for (ni, node) in nodes.iter().enumerate() {
        let row: Vec<bool> = match node {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(a) => {
                let bit = alphabet
                    .iter()
                    .position(|x| x == a)
                    .unwrap_or_else(|| panic!("atom `{a}` not in alphabet"));
                (0..n).map(|i| sym(i) & (1 << bit) != 0).collect()
            }
            Formula::Not(a) => {
                let c = &sat[idx_of(&nodes[..ni], a)];
                c.iter().map(|&v| !v).collect()
            }
            Formula::And(a, b) => {
                let (ca, cb) = (
                    sat[idx_of(&nodes[..ni], a)].clone(),
                    &sat[idx_of(&nodes[..ni], b)],
                );
                ca.iter().zip(cb).map(|(&x, &y)| x && y).collect()
            }
            Formula::Or(a, b) => {
                let (ca, cb) = (
                    sat[idx_of(&nodes[..ni], a)].clone(),
                    &sat[idx_of(&nodes[..ni], b)],
                );
                ca.iter().zip(cb).map(|(&x, &y)| x || y).collect()
            }
            Formula::Next(a) => {
                let c = &sat[idx_of(&nodes[..ni], a)];
                (0..n).map(|i| c[next(i)]).collect()
            }
            Formula::Finally(a) => {
                let c = &sat[idx_of(&nodes[..ni], a)];
                lfp(n, next, |i, row| c[i] || row[next(i)])
            }
            Formula::Globally(a) => {
                let c = &sat[idx_of(&nodes[..ni], a)];
                gfp(n, next, |i, row| c[i] && row[next(i)])
            }
            Formula::Until(a, b) => {
                let ca = sat[idx_of(&nodes[..ni], a)].clone();
                let cb = &sat[idx_of(&nodes[..ni], b)];
                lfp(n, next, |i, row| cb[i] || (ca[i] && row[next(i)]))
            }
            Formula::Release(a, b) => {
                let ca = sat[idx_of(&nodes[..ni], a)].clone();
                let cb = &sat[idx_of(&nodes[..ni], b)];
                gfp(n, next, |i, row| cb[i] && (ca[i] || row[next(i)]))
            }
        };
        sat.push(row);
    }

    sat.last().expect("nonempty formula")[0]
}

/// Least fixpoint of a monotone one-step rule, from all-false.
fn lfp(n: usize, next: impl Fn(usize) -> usize, step: impl Fn(usize, &[bool]) -> bool) -> Vec<bool> {
    fixpoint(vec![false; n], n, next, step)
}

/// Greatest fixpoint of a monotone one-step rule, from all-true.
fn gfp(n: usize, next: impl Fn(usize) -> usize, step: impl Fn(usize, &[bool]) -> bool) -> Vec<bool> {
    fixpoint(vec![true; n], n, next, step)
}

fn fixpoint(
    mut row: Vec<bool>,
    n: usize,
    _next: impl Fn(usize) -> usize,
    step: impl Fn(usize, &[bool]) -> bool,
) -> Vec<bool> {
    // Each backward sweep propagates information one wrap further; n + 1
    // sweeps are always enough on a lasso of n positions.
    for _ in 0..=n {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = step(i, &row);
            if v != row[i] {
                row[i] = v;
                changed = true;
            }
        }
        if !changed {
            return row;
        }
    }
    panic!("fixpoint failed to converge");
}
