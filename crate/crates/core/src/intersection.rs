//! Horizon-bounded intersection of a dependency class's specification
//! automata, with the rotating acceptance counter and per-state
//! progressive values.

use crate::agent::TaskSpec;
use crate::sym::{submasks, ServiceSet};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Lexicographic progress measure: the acceptance-rotation counter first,
/// then the negated distance to an accepting state (`NEG_INF` = no path).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Progress {
    pub k: u32,
    pub negdist: i64,
}

impl Progress {
    pub const NEG_INF: i64 = i64::MIN;
    pub const ZERO: Progress = Progress { k: 0, negdist: 0 };

    pub fn is_finite(&self) -> bool {
        self.negdist != Self::NEG_INF
    }
}

impl std::fmt::Display for Progress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_finite() {
            write!(f, "({},{})", self.k, self.negdist)
        } else {
            write!(f, "({},-inf)", self.k)
        }
    }
}

#[derive(Debug, Clone)]
struct AState {
    qvec: Box<[u32]>,
    k: u32,
    min_depth: u32,
    expanded: bool,
}

/// Intersection automaton of one dependency class up to horizon `h`.
///
/// State identity is the pair (member-state vector, counter); layers are
/// construction bookkeeping only, so a state revisited on a longer path
/// contributes edges, never duplicates. Stored adjacency omits pure
/// self-loops (they never affect distances); [`Self::successors_on`]
/// resolves arbitrary joint symbols on demand, self-loops included.
#[derive(Debug, Clone)]
pub struct IntersectionAutomaton {
    pub h: usize,
    /// Internal agent indices in class priority order.
    pub members: Vec<usize>,
    own_masks: Vec<ServiceSet>,
    class_mask: ServiceSet,
    states: Vec<AState>,
    /// qvec -> [(counter, state id)]
    index: HashMap<Box<[u32]>, Vec<(u32, u32)>>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    accepting: Vec<bool>,
    v: Vec<Progress>,
    retained: Vec<bool>,
    /// Successor state-vector sets per source vector, shared across
    /// counter values during construction and extension.
    vec_cache: HashMap<Box<[u32]>, Vec<(Box<[u32]>, u32, u32)>>,
    pruned: bool,
}

impl IntersectionAutomaton {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_retained(&self) -> usize {
        self.retained.iter().filter(|&&r| r).count()
    }

    pub fn n_edges(&self) -> usize {
        self.succ.iter().map(|s| s.len()).sum()
    }

    pub fn init(&self) -> u32 {
        0
    }

    pub fn state_vector(&self, s: u32) -> &[u32] {
        &self.states[s as usize].qvec
    }

    pub fn counter(&self, s: u32) -> u32 {
        self.states[s as usize].k
    }

    pub fn min_depth(&self, s: u32) -> u32 {
        self.states[s as usize].min_depth
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    pub fn is_retained(&self, s: u32) -> bool {
        self.retained[s as usize]
    }

    pub fn has_accepting(&self) -> bool {
        self.accepting.iter().any(|&a| a)
    }

    /// The progressive value of a state.
    pub fn progressive_value(&self, s: u32) -> Progress {
        self.v[s as usize]
    }

    /// Rotation position (0-based member index) charged at counter `k`;
    /// the counter cycles through the class members in priority order.
    fn rotation(&self, k: u32) -> usize {
        ((k - 1) as usize) % self.members.len()
    }

    /// The counter advances exactly when the charged member's run enters
    /// an accepting state: the member acts non-silently (one of its word
    /// positions) and its component lands on an accepting state. Counting
    /// a frozen accepting component instead would burn an unrolling layer
    /// per waiting step and reward junk services that re-leave the state.
    fn bumps(&self, specs: &[TaskSpec], k: u32, kappa_silent: bool, kappa_target: u32) -> bool {
        let kappa = self.rotation(k);
        !kappa_silent
            && specs[self.members[kappa]]
                .automaton
                .is_accepting(kappa_target)
    }

    fn lookup(&self, qvec: &[u32], k: u32) -> Option<u32> {
        self.index
            .get(qvec)?
            .iter()
            .find(|&&(kk, _)| kk == k)
            .map(|&(_, id)| id)
    }

    fn intern(&mut self, qvec: &[u32], k: u32, depth: u32) -> (u32, bool) {
        if let Some(id) = self.lookup(qvec, k) {
            return (id, false);
        }
        let boxed: Box<[u32]> = qvec.into();
        let i = self.states.len() as u32;
        self.states.push(AState {
            qvec: boxed.clone(),
            k,
            min_depth: depth,
            expanded: false,
        });
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.accepting.push(false);
        self.v.push(Progress {
            k,
            negdist: Progress::NEG_INF,
        });
        self.retained.push(true);
        self.index.entry(boxed).or_default().push((k, i));
        (i, true)
    }

    /// All successor state vectors of `qvec` over every joint symbol, in
    /// deterministic order, each annotated with the member sets that can
    /// be silent / non-silent on some symbol producing it. Cached per
    /// vector and shared across counter values.
    fn successor_vectors(&mut self, specs: &[TaskSpec], qvec: &[u32]) -> Vec<(Box<[u32]>, u32, u32)> {
        if let Some(hit) = self.vec_cache.get(qvec) {
            return hit.clone();
        }
        let n = self.members.len();
        // target vector -> (silent-capable members, non-silent-capable members)
        let mut found: BTreeMap<Box<[u32]>, (u32, u32)> = BTreeMap::new();
        let mut per_member: Vec<Vec<u32>> = vec![Vec::new(); n];
        for silent_mask in 0u32..(1 << n) {
            let mut free = 0u64;
            for m in 0..n {
                if silent_mask & (1 << m) == 0 {
                    free |= self.own_masks[m];
                }
            }
            for union in submasks(free) {
                let mut dead = false;
                for m in 0..n {
                    per_member[m].clear();
                    if silent_mask & (1 << m) != 0 {
                        per_member[m].push(qvec[m]);
                    } else {
                        let spec = &specs[self.members[m]];
                        let local = spec.local_symbol(union);
                        spec.automaton
                            .for_each_successor(qvec[m], local, |t| per_member[m].push(t));
                        if per_member[m].is_empty() {
                            dead = true;
                            break;
                        }
                    }
                }
                if dead {
                    continue;
                }
                let nonsilent_mask = !silent_mask & ((1 << n) - 1);
                for_each_combo(&per_member, |vec| {
                    let e = found.entry(vec.into()).or_insert((0, 0));
                    e.0 |= silent_mask;
                    e.1 |= nonsilent_mask;
                });
            }
        }
        let list: Vec<(Box<[u32]>, u32, u32)> =
            found.into_iter().map(|(v, (s, ns))| (v, s, ns)).collect();
        self.vec_cache.insert(qvec.into(), list.clone());
        list
    }

    fn expand_layers(&mut self, specs: &[TaskSpec], up_to: usize) {
        let mut frontier: VecDeque<u32> = (0..self.states.len() as u32)
            .filter(|&s| !self.states[s as usize].expanded)
            .collect();
        while let Some(s) = frontier.pop_front() {
            let depth = self.states[s as usize].min_depth;
            if depth as usize >= up_to || self.states[s as usize].expanded {
                continue;
            }
            self.states[s as usize].expanded = true;
            let (qvec, k) = {
                let st = &self.states[s as usize];
                (st.qvec.clone(), st.k)
            };
            let kappa = self.rotation(k);
            let kappa_bit = 1u32 << kappa;
            for (tvec, silent_ok, nonsilent_ok) in self.successor_vectors(specs, &qvec) {
                // The counter depends on how the charged member moves;
                // both a banking and a non-banking edge may exist for one
                // target vector.
                let bump = self.bumps(specs, k, false, tvec[kappa]);
                let mut variants: Vec<(u32, bool)> = Vec::with_capacity(2);
                if nonsilent_ok & kappa_bit != 0 {
                    variants.push(if bump { (k + 1, true) } else { (k, false) });
                }
                if silent_ok & kappa_bit != 0 && !variants.contains(&(k, false)) {
                    variants.push((k, false));
                }
                for (k2, banked) in variants {
                    if tvec == qvec && k2 == k {
                        continue; // pure self-loop: kept implicit
                    }
                    let (t, fresh) = self.intern(&tvec, k2, depth + 1);
                    if banked {
                        self.accepting[t as usize] = true;
                    }
                    if !self.succ[s as usize].contains(&t) {
                        self.succ[s as usize].push(t);
                        self.pred[t as usize].push(s);
                    }
                    if fresh {
                        frontier.push_back(t);
                    }
                }
            }
        }
        self.h = up_to;
    }

    /// Acceptance flags are set during expansion (targets of banking
    /// edges); this derives distances and progressive values from them.
    fn recompute_values(&mut self) {
        // Multi-source reverse BFS from the accepting set.
        let mut dist: Vec<i64> = vec![Progress::NEG_INF; self.states.len()];
        let mut queue = VecDeque::new();
        for i in 0..self.states.len() {
            if self.accepting[i] {
                dist[i] = 0;
                queue.push_back(i as u32);
            }
        }
        while let Some(s) = queue.pop_front() {
            let d = dist[s as usize];
            for &p in &self.pred[s as usize] {
                if dist[p as usize] == Progress::NEG_INF {
                    dist[p as usize] = d - 1;
                    queue.push_back(p);
                }
            }
        }
        for i in 0..self.states.len() {
            self.v[i] = Progress {
                k: self.states[i].k,
                negdist: dist[i],
            };
        }
    }

    /// Drops every state that cannot progress (no path to the accepting
    /// set), along with its edges. The initial state survives even when
    /// the accepting set is empty; the planner reacts by extending the
    /// horizon.
    pub fn prune_nonprogressing(&mut self) {
        for i in 0..self.states.len() {
            self.retained[i] = self.v[i].is_finite() || i == 0;
        }
        for s in 0..self.states.len() {
            if !self.retained[s] {
                self.succ[s].clear();
                self.pred[s].clear();
            } else {
                let retained = &self.retained;
                self.succ[s].retain(|&t| retained[t as usize]);
                self.pred[s].retain(|&t| retained[t as usize]);
            }
        }
        self.pruned = true;
    }

    /// Extends the layered construction to a deeper horizon in place.
    pub fn extend_to(&mut self, specs: &[TaskSpec], new_h: usize) {
        assert!(!self.pruned, "extend before pruning");
        assert!(new_h >= self.h);
        self.expand_layers(specs, new_h);
        self.recompute_values();
    }

    /// Successor states of `s` under the joint symbol given by per-member
    /// silent flags and the union of the provided service sets. Resolution
    /// is on demand and includes pure self-loops; states removed by
    /// pruning are skipped. Frontier states (first reached at depth `h`)
    /// have no outgoing transitions.
    pub fn successors_on(
        &self,
        specs: &[TaskSpec],
        s: u32,
        silent: &[bool],
        union: ServiceSet,
        out: &mut Vec<u32>,
    ) {
        out.clear();
        let st = &self.states[s as usize];
        if !st.expanded || !self.retained[s as usize] {
            return;
        }
        debug_assert_eq!(union & !self.class_mask, 0);
        let n = self.members.len();
        let kappa = self.rotation(st.k);
        let k = st.k;
        let mut per_member: Vec<Vec<u32>> = Vec::with_capacity(n);
        for m in 0..n {
            if silent[m] {
                per_member.push(vec![st.qvec[m]]);
            } else {
                let spec = &specs[self.members[m]];
                let local = spec.local_symbol(union);
                let mut succs = Vec::new();
                spec.automaton
                    .for_each_successor(st.qvec[m], local, |t| succs.push(t));
                if succs.is_empty() {
                    return;
                }
                per_member.push(succs);
            }
        }
        for_each_combo(&per_member, |vec| {
            let k2 = if self.bumps(specs, k, silent[kappa], vec[kappa]) {
                k + 1
            } else {
                k
            };
            if let Some(t) = self.lookup(vec, k2) {
                if self.retained[t as usize] && !out.contains(&t) {
                    out.push(t);
                }
            }
        });
    }

    /// Stored adjacency (pruned when pruning ran; pure self-loops absent).
    pub fn successors(&self, s: u32) -> &[u32] {
        &self.succ[s as usize]
    }

    /// Text dump with progressive-value annotations.
    pub fn dump_text(&self, specs: &[TaskSpec]) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(out, "# intersection automaton, h={}", self.h).unwrap();
        writeln!(
            out,
            "# members: {}",
            self.members
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        )
        .unwrap();
        for (i, st) in self.states.iter().enumerate() {
            if !self.retained[i] {
                continue;
            }
            let names: Vec<&str> = st
                .qvec
                .iter()
                .enumerate()
                .map(|(m, &q)| specs[self.members[m]].automaton.state_name(q))
                .collect();
            writeln!(
                out,
                "state {} ; ({},{}) ; V={}{}{}",
                i,
                names.join("|"),
                st.k,
                self.v[i],
                if self.accepting[i] { " ; accepting" } else { "" },
                if i == 0 { " ; init" } else { "" },
            )
            .unwrap();
        }
        for (s, succs) in self.succ.iter().enumerate() {
            for &t in succs {
                writeln!(out, "{s} ; - ; {t}").unwrap();
            }
        }
        out
    }
}

/// Calls `f` with every combination picking one element per inner list.
fn for_each_combo(lists: &[Vec<u32>], mut f: impl FnMut(&[u32])) {
    let n = lists.len();
    let mut combo = vec![0usize; n];
    let mut buf = vec![0u32; n];
    loop {
        for m in 0..n {
            buf[m] = lists[m][combo[m]];
        }
        f(&buf);
        let mut m = 0;
        loop {
            if m == n {
                return;
            }
            combo[m] += 1;
            if combo[m] < lists[m].len() {
                break;
            }
            combo[m] = 0;
            m += 1;
        }
    }
}

/// Looks up a state id by member-state vector and counter (test and
/// debug support).
impl IntersectionAutomaton {
    pub fn find_state(&self, qvec: &[u32], k: u32) -> Option<u32> {
        self.lookup(qvec, k)
    }
}

/// Builds the intersection automaton of the class `members` (internal
/// agent indices, priority order) from the agents' current specification
/// states, unrolled to horizon `h`.
pub fn build_intersection(
    specs: &[TaskSpec],
    models: &[crate::agent::AgentModel],
    members: &[usize],
    current: &[u32],
    h: usize,
) -> IntersectionAutomaton {
    assert!(!members.is_empty());
    assert!(h >= 1);
    let own_masks: Vec<ServiceSet> = members.iter().map(|&m| models[m].services).collect();
    let class_mask = own_masks.iter().fold(0, |acc, m| acc | m);
    let mut a = IntersectionAutomaton {
        h: 0,
        members: members.to_vec(),
        own_masks,
        class_mask,
        states: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        pred: Vec::new(),
        accepting: Vec::new(),
        v: Vec::new(),
        retained: Vec::new(),
        vec_cache: HashMap::new(),
        pruned: false,
    };
    let init_vec: Vec<u32> = members.iter().map(|&m| current[m]).collect();
    a.intern(&init_vec, 1, 0);
    a.expand_layers(specs, h);
    a.recompute_values();
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{AgentModel, Label, TaskSpec, TransitionSystem};
    use crate::buchi::fixtures::spec_over_abc;
    use crate::ltl::Formula;

    /// One agent owning all of {a, b, c}, tasked with the shared fixture
    /// automaton (completed); plus a single-state model.
    fn fixture_class() -> (Vec<TaskSpec>, Vec<AgentModel>) {
        let mut ts = TransitionSystem::new(vec!["x".into()], 0);
        let stay = ts.add_action("stay", Label::Silent);
        ts.add_transition(0, stay, 0).unwrap();
        for (i, name) in ["svc_a", "svc_b", "svc_c"].iter().enumerate() {
            let act = ts.add_action(*name, Label::Provide(1 << i));
            ts.add_transition(0, act, 0).unwrap();
        }
        let model = AgentModel {
            id: 1,
            ts,
            services: 0b111,
        };
        let spec = TaskSpec {
            owner: 0,
            depends: vec![0],
            big_mask: 0b111,
            formula: Formula::True,
            automaton: spec_over_abc().complete_deadlock_free(),
        };
        (vec![spec], vec![model])
    }

    fn q(specs: &[TaskSpec], name: &str) -> u32 {
        specs[0].automaton.state_named(name).unwrap()
    }

    #[test]
    fn singleton_class_unrolls_the_single_automaton() {
        let (specs, models) = fixture_class();
        let a = build_intersection(&specs, &models, &[0], &[0], 2);
        // depth 0: (q1,1); depth 1: q2 and sink; depth 2: q3 (entered via
        // the banking edge, so with counter 2), q4 and sink.
        let q1 = q(&specs, "q1");
        let q2 = q(&specs, "q2");
        let q3 = q(&specs, "q3");
        let q4 = q(&specs, "q4");
        let sink = specs[0].automaton.sink().unwrap();
        assert_eq!(a.find_state(&[q1], 1), Some(0));
        assert!(a.find_state(&[q2], 1).is_some());
        assert!(a.find_state(&[q3], 2).is_some());
        assert!(a.find_state(&[q3], 1).is_none());
        assert!(a.find_state(&[q4], 1).is_some());
        assert!(a.find_state(&[sink], 1).is_some());
        assert_eq!(a.n_states(), 5);
        // the accepting set is exactly the banked q3 state
        let s3 = a.find_state(&[q3], 2).unwrap();
        for s in 0..a.n_states() as u32 {
            assert_eq!(a.is_accepting(s), s == s3, "state {s}");
        }
        assert!(a.has_accepting());
    }

    #[test]
    fn counter_increments_exactly_at_accepting_entries() {
        let (specs, models) = fixture_class();
        let a = build_intersection(&specs, &models, &[0], &[0], 4);
        for s in 0..a.n_states() as u32 {
            for &t in a.successors(s) {
                let dk = a.counter(t) - a.counter(s);
                assert!(dk <= 1, "edge {s} -> {t}");
                if dk == 1 {
                    // bumped edges land on an accepting component and the
                    // state is marked as banked
                    assert!(specs[0].automaton.is_accepting(a.state_vector(t)[0]));
                    assert!(a.is_accepting(t), "bump target {t} not banked");
                }
            }
        }
        // Re-providing the empty non-silent set loops on q3 and banks the
        // next rotation: counters 2 and 3 both appear.
        let q3 = q(&specs, "q3");
        let s3 = a.find_state(&[q3], 2).unwrap();
        assert!(a.find_state(&[q3], 3).is_some(), "repeat visits bank again");
        // A silent wait at the accepting vector banks nothing.
        let mut out = Vec::new();
        a.successors_on(&specs, s3, &[true], 0, &mut out);
        assert_eq!(out, vec![s3]);
        // A non-silent empty step from it advances the rotation.
        a.successors_on(&specs, s3, &[false], 0, &mut out);
        assert_eq!(out, vec![a.find_state(&[q3], 3).unwrap()]);
    }

    #[test]
    fn progressive_values_and_pruning() {
        let (specs, models) = fixture_class();
        let mut a = build_intersection(&specs, &models, &[0], &[0], 2);
        let q1 = q(&specs, "q1");
        let q2 = q(&specs, "q2");
        let q3 = q(&specs, "q3");
        let q4 = q(&specs, "q4");
        let sink = specs[0].automaton.sink().unwrap();
        let s1 = a.find_state(&[q1], 1).unwrap();
        let s2 = a.find_state(&[q2], 1).unwrap();
        let s3 = a.find_state(&[q3], 2).unwrap();
        let s4 = a.find_state(&[q4], 1).unwrap();
        let ssink = a.find_state(&[sink], 1).unwrap();
        assert_eq!(a.progressive_value(s1), Progress { k: 1, negdist: -2 });
        assert_eq!(a.progressive_value(s2), Progress { k: 1, negdist: -1 });
        assert_eq!(a.progressive_value(s3), Progress { k: 2, negdist: 0 });
        assert!(!a.progressive_value(s4).is_finite());
        a.prune_nonprogressing();
        assert!(a.is_retained(s1));
        assert!(a.is_retained(s3));
        assert!(!a.is_retained(s4));
        assert!(!a.is_retained(ssink));
        assert_eq!(a.n_retained(), 3);
        // dangling edges removed
        for s in 0..a.n_states() as u32 {
            for &t in a.successors(s) {
                assert!(a.is_retained(s) && a.is_retained(t));
            }
        }
    }

    #[test]
    fn pruning_never_removes_initial_state_without_accepting_set() {
        // A specification whose accepting states are unreachable from q4.
        let (mut specs, models) = fixture_class();
        // Start from q4: only self-loops, never accepting.
        let q4 = q(&specs, "q4");
        specs[0].automaton = specs[0].automaton.clone();
        let mut a = build_intersection(&specs, &models, &[0], &[q4], 3);
        assert!(!a.has_accepting());
        a.prune_nonprogressing();
        assert!(a.is_retained(a.init()));
        assert_eq!(a.n_retained(), 1);
    }

    #[test]
    fn extension_is_equivalent_to_building_deeper() {
        let (specs, models) = fixture_class();
        let mut a = build_intersection(&specs, &models, &[0], &[0], 1);
        a.extend_to(&specs, 3);
        let b = build_intersection(&specs, &models, &[0], &[0], 3);
        assert_eq!(a.n_states(), b.n_states());
        assert_eq!(a.n_edges(), b.n_edges());
        for s in 0..a.n_states() as u32 {
            let bs = b
                .find_state(a.state_vector(s), a.counter(s))
                .expect("same state set");
            assert_eq!(a.progressive_value(s), b.progressive_value(bs));
            assert_eq!(a.is_accepting(s), b.is_accepting(bs));
        }
    }

    #[test]
    fn on_demand_successors_match_def_and_allow_self_loops() {
        let (specs, models) = fixture_class();
        let a = build_intersection(&specs, &models, &[0], &[0], 2);
        let mut out = Vec::new();
        // silent step: pure self-loop resolved on demand
        a.successors_on(&specs, a.init(), &[true], 0, &mut out);
        assert_eq!(out, vec![a.init()]);
        // providing {a,b} from q1 advances to the q2 vector
        a.successors_on(&specs, a.init(), &[false], 0b011, &mut out);
        let q2 = q(&specs, "q2");
        assert_eq!(out, vec![a.find_state(&[q2], 1).unwrap()]);
        // frontier states have no outgoing transitions
        let q3 = q(&specs, "q3");
        let s3 = a.find_state(&[q3], 2).unwrap();
        assert_eq!(a.min_depth(s3), 2);
        a.successors_on(&specs, s3, &[true], 0, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn two_member_class_requires_joint_symbol() {
        // Agent 0 owns {a}, agent 1 owns {b}; the fixture needs {a,b} to
        // leave q1, so only a joint non-silent step advances it.
        let (mut specs, mut models) = fixture_class();
        models[0].services = 0b001;
        models.push(AgentModel {
            id: 2,
            ts: models[0].ts.clone(),
            services: 0b010,
        });
        specs[0].depends = vec![0, 1];
        specs.push(TaskSpec {
            owner: 1,
            depends: vec![1],
            big_mask: 0b010,
            formula: Formula::True,
            automaton: crate::buchi::ltl_to_buchi(
                &Formula::True,
                crate::sym::Alphabet::with_global_bits(vec!["b".into()], vec![1], 10).unwrap(),
            ),
        });
        let a = build_intersection(&specs, &models, &[0, 1], &[0, 0], 2);
        let q1 = q(&specs, "q1");
        let q2 = q(&specs, "q2");
        let t0 = specs[1].automaton.init();
        let mut out = Vec::new();
        let silent_b = [false, true];
        // a alone goes to the sink, not to q2
        a.successors_on(&specs, a.init(), &silent_b, 0b001, &mut out);
        let sink = specs[0].automaton.sink().unwrap();
        assert_eq!(out, vec![a.find_state(&[sink, t0], 1).unwrap()]);
        // both non-silent with {a} ∪ {b} reaches q2
        a.successors_on(&specs, a.init(), &[false, false], 0b011, &mut out);
        assert!(out.contains(&a.find_state(&[q2, t0], 1).unwrap()));
        let _ = q1;
    }
}
