//! Horizon-bounded product of a dependency class's transition systems with
//! its intersection automaton, progressive-state search, shortest paths
//! and projection onto per-agent plan fragments.

use crate::agent::{AgentModel, TaskSpec};
use crate::intersection::{IntersectionAutomaton, Progress};
use std::collections::{HashMap, VecDeque};

const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct PState {
    svec: Box<[u32]>,
    a: u32,
}

/// One edge of a reconstructed product path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    /// Per-member action indices.
    pub actions: Box<[u32]>,
    /// Product state reached by the step.
    pub state: u32,
}

/// Product system of one dependency class up to the planning horizon.
///
/// States are explored by breadth-first search over (state, flag) nodes,
/// where the flag records whether the path so far contains a non-silent
/// action of the highest-priority member. Parents are kept per node, so
/// shortest paths (plain or flagged) fall out of the search tree.
#[derive(Debug)]
pub struct ProductSystem {
    pub members: Vec<usize>,
    pub plan_horizon: usize,
    states: Vec<PState>,
    index: HashMap<Box<[u32]>, Vec<(u32, u32)>>,
    /// Node arrays: node = state * 2 + flag.
    depth: Vec<u32>,
    parent: Vec<Option<(u32, Box<[u32]>)>>,
    v: Vec<Progress>,
    v_init: Progress,
}

impl ProductSystem {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn init(&self) -> u32 {
        0
    }

    pub fn initial_value(&self) -> Progress {
        self.v_init
    }

    pub fn value(&self, s: u32) -> Progress {
        self.v[s as usize]
    }

    pub fn ts_vector(&self, s: u32) -> &[u32] {
        &self.states[s as usize].svec
    }

    pub fn a_state(&self, s: u32) -> u32 {
        self.states[s as usize].a
    }

    /// Depth of the state (fewest joint steps from the initial state).
    pub fn state_depth(&self, s: u32) -> u32 {
        let d0 = self.depth[s as usize * 2];
        let d1 = self.depth[s as usize * 2 + 1];
        d0.min(d1)
    }

    fn flagged_depth(&self, s: u32) -> u32 {
        self.depth[s as usize * 2 + 1]
    }

    pub fn is_progressive(&self, s: u32) -> bool {
        self.v[s as usize] > self.v_init
    }

    /// A maximally progressive state: largest progressive value, ties
    /// broken by shorter distance from the initial state, then discovery
    /// order. `None` when no progressive state exists.
    pub fn find_max_progressive(&self) -> Option<u32> {
        self.select_max(|s| self.state_depth(s))
    }

    /// Like [`Self::find_max_progressive`], but restricted to states
    /// reachable via a path on which the highest-priority member provides
    /// at least one non-silent (possibly empty) service set.
    pub fn find_max_progressive_flagged(&self) -> Option<u32> {
        let best = self.select_max_filtered(|s| self.flagged_depth(s));
        best
    }

    fn select_max(&self, depth_of: impl Fn(u32) -> u32) -> Option<u32> {
        let mut best: Option<(Progress, std::cmp::Reverse<u32>, std::cmp::Reverse<u32>, u32)> =
            None;
        for s in 0..self.states.len() as u32 {
            if !self.is_progressive(s) {
                continue;
            }
            let d = depth_of(s);
            if d == UNSEEN {
                continue;
            }
            let key = (
                self.v[s as usize],
                std::cmp::Reverse(d),
                std::cmp::Reverse(s),
                s,
            );
            if best.as_ref().map_or(true, |b| key > *b) {
                best = Some(key);
            }
        }
        best.map(|(_, _, _, s)| s)
    }

    fn select_max_filtered(&self, depth_of: impl Fn(u32) -> u32) -> Option<u32> {
        self.select_max(depth_of)
    }

    /// Shortest path (by joint steps) from the initial state to `target`.
    /// An empty path is returned for the initial state itself.
    pub fn shortest_path_to(&self, target: u32) -> Vec<PathStep> {
        let node = if self.depth[target as usize * 2] <= self.depth[target as usize * 2 + 1] {
            target * 2
        } else {
            target * 2 + 1
        };
        self.path_to_node(node)
    }

    /// Shortest path to `target` that contains a non-silent action of the
    /// highest-priority member.
    pub fn flagged_path_to(&self, target: u32) -> Vec<PathStep> {
        assert_ne!(
            self.depth[target as usize * 2 + 1],
            UNSEEN,
            "target not reachable with the required non-silent step"
        );
        self.path_to_node(target * 2 + 1)
    }

    fn path_to_node(&self, mut node: u32) -> Vec<PathStep> {
        assert_ne!(self.depth[node as usize], UNSEEN, "target unreachable");
        let mut steps = Vec::new();
        while let Some((prev, actions)) = &self.parent[node as usize] {
            steps.push(PathStep {
                actions: actions.clone(),
                state: node / 2,
            });
            node = *prev;
        }
        steps.reverse();
        steps
    }

    /// Projects a product path onto per-agent plan fragments.
    pub fn project(
        &self,
        a: &IntersectionAutomaton,
        models: &[AgentModel],
        path: &[PathStep],
    ) -> PlanFragment {
        let n = self.members.len();
        let target_value = path
            .last()
            .map(|st| self.value(st.state))
            .unwrap_or(self.v_init);
        let mut frag = PlanFragment {
            members: self.members.clone(),
            ts_states: vec![Vec::with_capacity(path.len() + 1); n],
            actions: vec![Vec::with_capacity(path.len()); n],
            ba_states: vec![Vec::with_capacity(path.len() + 1); n],
            lifted_runs: vec![Vec::new(); n],
            target_value,
        };
        let mut cur = self.init();
        for m in 0..n {
            frag.ts_states[m].push(self.ts_vector(cur)[m]);
            let q = a.state_vector(self.a_state(cur))[m];
            frag.ba_states[m].push(q);
            frag.lifted_runs[m].push(q);
        }
        for step in path {
            for m in 0..n {
                let agent = self.members[m];
                let action = step.actions[m];
                frag.actions[m].push(action);
                frag.ts_states[m].push(self.ts_vector(step.state)[m]);
                let q = a.state_vector(self.a_state(step.state))[m];
                frag.ba_states[m].push(q);
                if !models[agent].label(action).is_silent() {
                    frag.lifted_runs[m].push(q);
                }
            }
            cur = step.state;
        }
        let _ = cur;
        frag
    }
}

/// Per-agent finite trace fragments and specification-state sequences
/// projected from one product path. All members' fragments have equal
/// length: the plan advances the class in lockstep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanFragment {
    /// Internal agent indices, class priority order.
    pub members: Vec<usize>,
    /// Per member: states s_1 .. s_{m}.
    pub ts_states: Vec<Vec<u32>>,
    /// Per member: actions α_1 .. α_{m-1}.
    pub actions: Vec<Vec<u32>>,
    /// Per member: specification-state sequence aligned with `ts_states`.
    pub ba_states: Vec<Vec<u32>>,
    /// Per member: the corresponding run (initial state plus the states
    /// at the member's non-silent steps).
    pub lifted_runs: Vec<Vec<u32>>,
    pub target_value: Progress,
}

impl PlanFragment {
    pub fn len(&self) -> usize {
        self.actions.first().map_or(0, |a| a.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds the product of the class members' transition systems with the
/// intersection automaton, unrolled to `plan_horizon` joint steps from
/// the members' current system states.
pub fn build_product(
    specs: &[TaskSpec],
    models: &[AgentModel],
    a: &IntersectionAutomaton,
    current_ts: &[u32],
    plan_horizon: usize,
) -> ProductSystem {
    assert!(plan_horizon >= 1);
    let members = a.members.clone();
    let n = members.len();
    let init_svec: Box<[u32]> = members.iter().map(|&m| current_ts[m]).collect();
    let v_init = a.progressive_value(a.init());

    let mut p = ProductSystem {
        members: members.clone(),
        plan_horizon,
        states: Vec::new(),
        index: HashMap::new(),
        depth: Vec::new(),
        parent: Vec::new(),
        v: Vec::new(),
        v_init,
    };
    let init_id = p.intern(&init_svec, a.init(), a);
    debug_assert_eq!(init_id, 0);
    p.depth[0] = 0;

    let mut queue = VecDeque::from([0u32]);
    let mut silent = vec![false; n];
    let mut succ_buf: Vec<u32> = Vec::new();
    let mut svec_buf: Vec<u32> = vec![0; n];
    while let Some(node) = queue.pop_front() {
        let d = p.depth[node as usize];
        if d as usize >= plan_horizon {
            continue;
        }
        let (state, flag) = (node / 2, node % 2 == 1);
        let (svec, a_state) = {
            let st = &p.states[state as usize];
            (st.svec.clone(), st.a)
        };
        // Joint actions in (member position, action id) order.
        let lists: Vec<&[(u32, u32)]> = (0..n)
            .map(|m| models[members[m]].ts.outgoing(svec[m]))
            .collect();
        let mut combo = vec![0usize; n];
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        loop {
            let mut union = 0u64;
            for m in 0..n {
                let (action, target) = lists[m][combo[m]];
                let label = models[members[m]].label(action);
                silent[m] = label.is_silent();
                union |= label.services();
                svec_buf[m] = target;
            }
            a.successors_on(specs, a_state, &silent, union, &mut succ_buf);
            if !succ_buf.is_empty() {
                let flag2 = flag || !silent[0];
                let actions: Box<[u32]> = (0..n).map(|m| lists[m][combo[m]].0).collect();
                for &a2 in &succ_buf {
                    let target = p.intern(&svec_buf, a2, a);
                    let tnode = target * 2 + flag2 as u32;
                    if p.depth[tnode as usize] == UNSEEN {
                        p.depth[tnode as usize] = d + 1;
                        p.parent[tnode as usize] = Some((node, actions.clone()));
                        queue.push_back(tnode);
                    }
                }
            }
            // advance combo
            let mut m = 0;
            loop {
                if m == n {
                    break;
                }
                combo[m] += 1;
                if combo[m] < lists[m].len() {
                    break;
                }
                combo[m] = 0;
                m += 1;
            }
            if m == n {
                break;
            }
        }
    }
    p
}

impl ProductSystem {
    fn intern(&mut self, svec: &[u32], a_state: u32, a: &IntersectionAutomaton) -> u32 {
        if let Some(list) = self.index.get(svec) {
            if let Some(&(_, id)) = list.iter().find(|&&(aa, _)| aa == a_state) {
                return id;
            }
        }
        let boxed: Box<[u32]> = svec.into();
        let id = self.states.len() as u32;
        self.states.push(PState {
            svec: boxed.clone(),
            a: a_state,
        });
        self.depth.push(UNSEEN);
        self.depth.push(UNSEEN);
        self.parent.push(None);
        self.parent.push(None);
        self.v.push(a.progressive_value(a_state));
        self.index.entry(boxed).or_default().push((a_state, id));
        id
    }
}

impl ProductSystem {
    /// Looks up a state id (test and debug support).
    pub fn find_state(&self, svec: &[u32], a_state: u32) -> Option<u32> {
        self.index
            .get(svec)?
            .iter()
            .find(|&&(aa, _)| aa == a_state)
            .map(|&(_, id)| id)
    }
}
