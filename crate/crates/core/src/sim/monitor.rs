//! Local-satisfaction monitoring: assembles the word an agent observes at
//! its own non-silent instants and judges the formula prefix on it.

use super::behavior::Behavior;
use crate::agent::{Label, TaskSpec};
use crate::buchi::ltl_to_buchi;
use crate::ltl::Formula;
use crate::sym::ServiceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every infinite continuation satisfies the formula.
    Satisfied,
    /// No infinite continuation satisfies the formula.
    Violated,
    /// The prefix decides nothing yet (always the case for empty words:
    /// validity requires an infinite word).
    Pending,
}

#[derive(Debug, Clone)]
pub struct MonitorReport {
    /// Word time sequence: instants of the agent's own non-silent actions.
    pub times: Vec<u64>,
    /// Observed word: the union of services provided at each instant by
    /// the dependency set, restricted to the task alphabet (global masks).
    pub word: Vec<ServiceSet>,
    pub verdict: Verdict,
    /// Accepting visits of the supplied executed run, when given.
    pub accepting_visits: Option<u64>,
    /// Whether the supplied run is a run of the automaton over the word.
    pub run_consistent: Option<bool>,
}

/// Monitors agent `agent` (internal index) against its task.
///
/// `behaviors` is indexed by internal agent index and must cover the
/// task's dependency set. `run` is the executed specification-state
/// sequence (initial state first, then one state per non-silent step);
/// when provided it is validated against the word and its accepting
/// visits are counted. `up_to` truncates observation to instants `<= t`.
pub fn monitor_local_satisfaction(
    behaviors: &[Behavior],
    agent: usize,
    spec: &TaskSpec,
    run: Option<&[u32]>,
    up_to: Option<u64>,
) -> MonitorReport {
    let own = &behaviors[agent];
    let mut times = Vec::new();
    let mut word = Vec::new();
    for j in 0..own.len() {
        if own.labels[j].is_silent() {
            continue;
        }
        let t = own.t_action[j];
        if up_to.is_some_and(|cut| t > cut) {
            break;
        }
        let mut observed = 0u64;
        for &d in &spec.depends {
            if let Label::Provide(m) = behaviors[d].provided_at(t) {
                observed |= m;
            }
        }
        times.push(t);
        word.push(observed & spec.big_mask);
    }

    let verdict = prefix_verdict(spec, &word);

    let (accepting_visits, run_consistent) = match run {
        Some(run) => {
            let mut consistent = run.len() == word.len() + 1
                && run.first() == Some(&spec.automaton.init());
            if consistent {
                for (j, &w) in word.iter().enumerate() {
                    let sym = spec.local_symbol(w);
                    if !spec.automaton.has_edge(run[j], sym, run[j + 1]) {
                        consistent = false;
                        break;
                    }
                }
            }
            let visits = run
                .iter()
                .skip(1)
                .filter(|&&q| spec.automaton.is_accepting(q))
                .count() as u64;
            (Some(visits), Some(consistent))
        }
        None => (None, None),
    };

    MonitorReport {
        times,
        word,
        verdict,
        accepting_visits,
        run_consistent,
    }
}

/// Three-valued prefix judgement via the automata of the formula and its
/// negation: a verdict is definite when one of them has no live run left.
fn prefix_verdict(spec: &TaskSpec, word: &[ServiceSet]) -> Verdict {
    if word.is_empty() {
        return Verdict::Pending;
    }
    if !live_after_prefix(&spec.automaton, word) {
        return Verdict::Violated;
    }
    let negated = Formula::not(spec.formula.clone()).to_nnf();
    let nb = ltl_to_buchi(&negated, spec.automaton.alphabet().clone());
    if !live_after_prefix(&nb, word) {
        return Verdict::Satisfied;
    }
    Verdict::Pending
}

fn live_after_prefix(b: &crate::buchi::BuchiAutomaton, word: &[ServiceSet]) -> bool {
    let nonempty = b.nonempty_language_states();
    let mut cur = vec![b.init()];
    for &w in word {
        let sym = b.alphabet().local_of_global(w);
        let mut next = Vec::new();
        for &q in &cur {
            b.for_each_successor(q, sym, |t| {
                if !next.contains(&t) {
                    next.push(t);
                }
            });
        }
        cur = next;
        if cur.is_empty() {
            return false;
        }
    }
    cur.iter().any(|&q| nonempty[q as usize])
}
