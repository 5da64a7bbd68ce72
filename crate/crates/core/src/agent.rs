//! Agent models: transition systems, silent/non-silent action labeling and
//! compiled task specifications.

use crate::buchi::BuchiAutomaton;
use crate::ltl::Formula;
use crate::sym::ServiceSet;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("agent {agent}: transition ({state}, {action}) defined twice")]
    NonDeterminism {
        agent: usize,
        state: String,
        action: String,
    },
    #[error("agent {agent}: state {state} is not mutually reachable")]
    Unreachable { agent: usize, state: String },
    #[error("agent {agent}: state {state} has no silent self-loop")]
    MissingSilentSelfLoop { agent: usize, state: String },
    #[error("{0}")]
    AlphabetOverlap(String),
    #[error("agent {agent}: unknown state `{name}`")]
    UnknownState { agent: usize, name: String },
}

/// Action label: a silent marker or a (possibly empty) service set.
///
/// The silent marker and the empty set are distinct: an empty non-silent
/// set still produces a word position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Silent,
    Provide(ServiceSet),
}

impl Label {
    pub fn is_silent(&self) -> bool {
        matches!(self, Label::Silent)
    }

    pub fn services(&self) -> ServiceSet {
        match self {
            Label::Silent => 0,
            Label::Provide(m) => *m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDef {
    pub name: String,
    pub label: Label,
}

/// Finite transition system with a partial deterministic transition
/// function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    state_names: Vec<String>,
    init: u32,
    actions: Vec<ActionDef>,
    /// Per state, sorted by action index.
    out: Vec<Vec<(u32, u32)>>,
}

impl TransitionSystem {
    pub fn new(state_names: Vec<String>, init: u32) -> Self {
        let n = state_names.len();
        assert!((init as usize) < n);
        Self {
            state_names,
            init,
            actions: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn init(&self) -> u32 {
        self.init
    }

    pub fn set_init(&mut self, s: u32) {
        assert!((s as usize) < self.n_states());
        self.init = s;
    }

    pub fn state_name(&self, s: u32) -> &str {
        &self.state_names[s as usize]
    }

    pub fn state_named(&self, name: &str) -> Option<u32> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32)
    }

    pub fn actions(&self) -> &[ActionDef] {
        &self.actions
    }

    pub fn action(&self, a: u32) -> &ActionDef {
        &self.actions[a as usize]
    }

    pub fn action_named(&self, name: &str) -> Option<u32> {
        self.actions
            .iter()
            .position(|a| a.name == name)
            .map(|i| i as u32)
    }

    pub fn add_action(&mut self, name: impl Into<String>, label: Label) -> u32 {
        self.actions.push(ActionDef {
            name: name.into(),
            label,
        });
        (self.actions.len() - 1) as u32
    }

    pub fn add_transition(&mut self, from: u32, action: u32, to: u32) -> Result<(), ()> {
        let list = &mut self.out[from as usize];
        match list.binary_search_by_key(&action, |(a, _)| *a) {
            Ok(_) => Err(()),
            Err(i) => {
                list.insert(i, (action, to));
                Ok(())
            }
        }
    }

    pub fn step(&self, from: u32, action: u32) -> Option<u32> {
        let list = &self.out[from as usize];
        list.binary_search_by_key(&action, |(a, _)| *a)
            .ok()
            .map(|i| list[i].1)
    }

    /// Outgoing `(action, target)` pairs, sorted by action index.
    pub fn outgoing(&self, from: u32) -> &[(u32, u32)] {
        &self.out[from as usize]
    }

    /// States where `action` is available.
    pub fn states_with_action(&self, action: u32) -> Vec<u32> {
        (0..self.n_states() as u32)
            .filter(|&s| self.step(s, action).is_some())
            .collect()
    }

    /// Unweighted shortest distance between states, in transitions.
    pub fn dist(&self, from: u32, to: u32) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut seen = vec![false; self.n_states()];
        seen[from as usize] = true;
        let mut queue = std::collections::VecDeque::from([(from, 0usize)]);
        while let Some((s, d)) = queue.pop_front() {
            for &(_, t) in self.outgoing(s) {
                if t == to {
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

    fn strongly_connected(&self) -> Result<(), u32> {
        let n = self.n_states();
        let reach = |succ: &dyn Fn(u32) -> Vec<u32>| -> Vec<bool> {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut queue = std::collections::VecDeque::from([0u32]);
            while let Some(s) = queue.pop_front() {
                for t in succ(s) {
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let fwd = reach(&|s| self.outgoing(s).iter().map(|&(_, t)| t).collect());
        let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n as u32 {
            for &(_, t) in self.outgoing(s) {
                pred[t as usize].push(s);
            }
        }
        let bwd = reach(&|s| pred[s as usize].clone());
        for s in 0..n {
            if !fwd[s] || !bwd[s] {
                return Err(s as u32);
            }
        }
        Ok(())
    }
}

/// Agent model: transition system, own service alphabet and action
/// labeling; every agent has the sync/nosync capability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentModel {
    /// External agent id (as named in the scenario).
    pub id: usize,
    pub ts: TransitionSystem,
    /// Own services as a global mask.
    pub services: ServiceSet,
}

impl AgentModel {
    /// Checks mutual reachability of all states and the presence of a
    /// silent self-loop per state; determinism is inherent in the map.
    pub fn validate(&self) -> Result<(), ModelError> {
        if let Err(s) = self.ts.strongly_connected() {
            return Err(ModelError::Unreachable {
                agent: self.id,
                state: self.ts.state_name(s).to_string(),
            });
        }
        for s in 0..self.ts.n_states() as u32 {
            let has_silent_loop = self
                .ts
                .outgoing(s)
                .iter()
                .any(|&(a, t)| t == s && self.ts.action(a).label.is_silent());
            if !has_silent_loop {
                return Err(ModelError::MissingSilentSelfLoop {
                    agent: self.id,
                    state: self.ts.state_name(s).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn label(&self, action: u32) -> Label {
        self.ts.action(action).label
    }
}

/// Compiled task: owner, dependency set, formula and its deadlock-free
/// automaton over the joint alphabet of the dependency set.
#[derive(Debug, Clone)]
pub struct TaskSpec {
    /// Internal index of the owning agent.
    pub owner: usize,
    /// Internal indices of agents the task depends on (owner included).
    pub depends: Vec<usize>,
    /// Joint alphabet as a global service mask.
    pub big_mask: ServiceSet,
    pub formula: Formula,
    pub automaton: BuchiAutomaton,
}

impl TaskSpec {
    /// Restricts a global service mask to this task's local symbol.
    pub fn local_symbol(&self, global: ServiceSet) -> u32 {
        self.automaton.alphabet().local_of_global(global)
    }
}

/// Per-action labels along a trace fragment (alternating states and
/// actions, starting and ending with a state).
pub fn service_set_sequence(
    ts: &TransitionSystem,
    labeling: impl Fn(u32) -> Label,
    states: &[u32],
    actions: &[u32],
) -> Result<Vec<Label>, String> {
    if states.len() != actions.len() + 1 {
        return Err("fragment must alternate states and actions".into());
    }
    let mut out = Vec::with_capacity(actions.len());
    for (i, &a) in actions.iter().enumerate() {
        match ts.step(states[i], a) {
            Some(t) if t == states[i + 1] => out.push(labeling(a)),
            _ => {
                return Err(format!(
                    "fragment step {i} is not a transition of the system"
                ))
            }
        }
    }
    Ok(out)
}

/// Non-silent subsequence of a service set sequence, with source indices.
/// The empty service set is non-silent and is retained.
pub fn non_silent_word(labels: &[Label]) -> Vec<(usize, ServiceSet)> {
    labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| match l {
            Label::Silent => None,
            Label::Provide(m) => Some((i, *m)),
        })
        .collect()
}

/// Internal indices of the agents owning services in `mask`.
pub fn owners_of_mask(table: &crate::sym::ServiceTable, mask: ServiceSet) -> BTreeSet<usize> {
    (0..table.len() as u32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| table.owner(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-state shuttle with a silent stay loop per state, silent moves,
    /// a labeled loop and an empty-set loop.
    fn shuttle() -> TransitionSystem {
        let mut ts = TransitionSystem::new(vec!["l".into(), "r".into()], 0);
        let stay = ts.add_action("stay", Label::Silent);
        let go = ts.add_action("go", Label::Silent);
        let back = ts.add_action("back", Label::Silent);
        let a = ts.add_action("svc_a", Label::Provide(0b1));
        let empty = ts.add_action("svc_none", Label::Provide(0));
        ts.add_transition(0, stay, 0).unwrap();
        ts.add_transition(1, stay, 1).unwrap();
        ts.add_transition(0, go, 1).unwrap();
        ts.add_transition(1, back, 0).unwrap();
        ts.add_transition(0, a, 0).unwrap();
        ts.add_transition(1, empty, 1).unwrap();
        ts
    }

    #[test]
    fn determinism_enforced_by_add() {
        let mut ts = shuttle();
        assert!(ts.add_transition(0, 1, 0).is_err());
    }

    #[test]
    fn validation_requires_silent_loops_and_reachability() {
        let ts = shuttle();
        let ok = AgentModel {
            id: 1,
            ts: ts.clone(),
            services: 0b1,
        };
        assert!(ok.validate().is_ok());

        let mut lonely = TransitionSystem::new(vec!["x".into(), "y".into()], 0);
        let stay = lonely.add_action("stay", Label::Silent);
        lonely.add_transition(0, stay, 0).unwrap();
        lonely.add_transition(1, stay, 1).unwrap();
        let bad = AgentModel {
            id: 2,
            ts: lonely,
            services: 0,
        };
        assert!(matches!(bad.validate(), Err(ModelError::Unreachable { .. })));

        let mut no_loop = TransitionSystem::new(vec!["x".into()], 0);
        let a = no_loop.add_action("svc", Label::Provide(0));
        no_loop.add_transition(0, a, 0).unwrap();
        let bad = AgentModel {
            id: 3,
            ts: no_loop,
            services: 0,
        };
        assert!(matches!(
            bad.validate(),
            Err(ModelError::MissingSilentSelfLoop { .. })
        ));
    }

    #[test]
    fn service_sequence_and_word_extraction() {
        let ts = shuttle();
        // l -svc_a-> l -go-> r -stay-> r -svc_none-> r -back-> l
        let states = [0, 0, 1, 1, 1, 0];
        let actions = [3, 1, 0, 4, 2];
        let labels = service_set_sequence(&ts, |a| ts.action(a).label, &states, &actions).unwrap();
        assert_eq!(
            labels,
            vec![
                Label::Provide(0b1),
                Label::Silent,
                Label::Silent,
                Label::Provide(0),
                Label::Silent
            ]
        );
        let word = non_silent_word(&labels);
        assert_eq!(word, vec![(0, 0b1), (3, 0)]);
    }

    #[test]
    fn all_silent_fragment_produces_empty_word() {
        let ts = shuttle();
        let labels =
            service_set_sequence(&ts, |a| ts.action(a).label, &[0, 1, 0], &[1, 2]).unwrap();
        assert!(non_silent_word(&labels).is_empty());
    }

    #[test]
    fn inconsistent_fragment_rejected() {
        let ts = shuttle();
        assert!(service_set_sequence(&ts, |a| ts.action(a).label, &[0, 0], &[1]).is_err());
    }
}
