//! Centralized baseline: the full synchronized team product with all
//! specification automata, searched for an accepting lasso. Exact and
//! complete, usable only at small scale; serves as a feasibility oracle
//! for the receding-horizon pipeline.

use crate::agent::{AgentModel, TaskSpec};
use crate::sym::ServiceSet;
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

/// Default cap on the estimated product size.
pub const SIZE_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("size guard exceeded: estimated {estimate} states (team {team}), limit {limit}")]
    SizeGuard {
        /// Full product estimate (team × specifications × counter).
        estimate: u128,
        /// Team transition-system size alone.
        team: u128,
        limit: u128,
    },
}

/// One synchronized step of the whole class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointStep {
    /// Per-member action indices (class order).
    pub actions: Box<[u32]>,
}

/// Accepting lasso of the centralized product: after `prefix`, repeating
/// `cycle` forever satisfies every member's task, including word validity
/// (every member provides non-silent service sets infinitely often).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLasso {
    /// Internal agent indices, class order.
    pub members: Vec<usize>,
    pub prefix: Vec<JointStep>,
    pub cycle: Vec<JointStep>,
}

/// Team size and full-product size estimates for the guard and reports.
pub fn size_estimate(
    specs: &[TaskSpec],
    models: &[AgentModel],
    members: &[usize],
) -> (u128, u128) {
    let team: u128 = members
        .iter()
        .map(|&m| models[m].ts.n_states() as u128)
        .product();
    let spec_part: u128 = members
        .iter()
        .map(|&m| specs[m].automaton.n_states() as u128)
        .product();
    let phases = 2 * members.len() as u128 * 2; // rotation phases × wrap flag
    (team, team.saturating_mul(spec_part).saturating_mul(phases))
}

/// True iff an accepting lasso exists for the class.
pub fn oracle_check_feasible(
    specs: &[TaskSpec],
    models: &[AgentModel],
    members: &[usize],
) -> Result<bool, OracleError> {
    centralized_synthesize(specs, models, members).map(|l| l.is_some())
}

struct OracleProduct<'a> {
    specs: &'a [TaskSpec],
    models: &'a [AgentModel],
    members: Vec<usize>,
    /// State data: member TS states, member spec states, phase, wrapped.
    states: Vec<(Box<[u32]>, Box<[u32]>, u32, bool)>,
    index: HashMap<(Box<[u32]>, Box<[u32]>, u32, bool), u32>,
    /// Lazily built adjacency: (target, joint action vector).
    adj: Vec<Option<Vec<(u32, Box<[u32]>)>>>,
}

impl<'a> OracleProduct<'a> {
    fn intern(&mut self, key: (Box<[u32]>, Box<[u32]>, u32, bool)) -> u32 {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(key.clone());
        self.adj.push(None);
        self.index.insert(key, i);
        i
    }

    fn accepting(&self, s: u32) -> bool {
        self.states[s as usize].3
    }

    /// The rotation has `2n` phases: phases `1..=n` wait for the current
    /// state of the corresponding specification automaton to be accepting;
    /// phases `n+1..=2n` wait for a step on which the corresponding member
    /// acts non-silently. Wrapping the full rotation marks acceptance, so
    /// accepting runs both satisfy every task and keep every word infinite.
    fn successors(&mut self, s: u32) -> Vec<(u32, Box<[u32]>)> {
        if let Some(cached) = &self.adj[s as usize] {
            return cached.clone();
        }
        let (svec, qvec, phase, _) = self.states[s as usize].clone();
        let n = self.members.len();
        let lists: Vec<&[(u32, u32)]> = (0..n)
            .map(|m| self.models[self.members[m]].ts.outgoing(svec[m]))
            .collect();
        let mut out: Vec<(u32, Box<[u32]>)> = Vec::new();
        let mut combo = vec![0usize; n];
        if lists.iter().any(|l| l.is_empty()) {
            self.adj[s as usize] = Some(out.clone());
            return out;
        }
        'combos: loop {
            let mut union: ServiceSet = 0;
            let mut silent = vec![false; n];
            let mut svec2 = vec![0u32; n];
            for m in 0..n {
                let (action, target) = lists[m][combo[m]];
                let label = self.models[self.members[m]].label(action);
                silent[m] = label.is_silent();
                union |= label.services();
                svec2[m] = target;
            }
            // phase progress for this step
            let cond = if (phase as usize) <= n {
                let kappa = phase as usize - 1;
                self.specs[self.members[kappa]]
                    .automaton
                    .is_accepting(qvec[kappa])
            } else {
                let member = phase as usize - n - 1;
                !silent[member]
            };
            let (phase2, wrapped) = if cond {
                if phase as usize == 2 * n {
                    (1, true)
                } else {
                    (phase + 1, false)
                }
            } else {
                (phase, false)
            };
            // member spec moves
            let mut per_member: Vec<Vec<u32>> = Vec::with_capacity(n);
            for m in 0..n {
                if silent[m] {
                    per_member.push(vec![qvec[m]]);
                } else {
                    let spec = &self.specs[self.members[m]];
                    let local = spec.local_symbol(union);
                    let mut succs = Vec::new();
                    spec.automaton
                        .for_each_successor(qvec[m], local, |t| succs.push(t));
                    if succs.is_empty() {
                        advance(&mut combo, &lists);
                        if combo.iter().all(|&c| c == 0) {
                            break 'combos;
                        }
                        continue 'combos;
                    }
                    per_member.push(succs);
                }
            }
            let actions: Box<[u32]> = (0..n).map(|m| lists[m][combo[m]].0).collect();
            let mut pick = vec![0usize; n];
            loop {
                let qvec2: Box<[u32]> = (0..n).map(|m| per_member[m][pick[m]]).collect();
                let t = self.intern((
                    svec2.clone().into_boxed_slice(),
                    qvec2,
                    phase2,
                    wrapped,
                ));
                out.push((t, actions.clone()));
                let mut m = 0;
                loop {
                    if m == n {
                        break;
                    }
                    pick[m] += 1;
                    if pick[m] < per_member[m].len() {
                        break;
                    }
                    pick[m] = 0;
                    m += 1;
                }
                if m == n {
                    break;
                }
            }
            advance(&mut combo, &lists);
            if combo.iter().all(|&c| c == 0) {
                break;
            }
        }
        self.adj[s as usize] = Some(out.clone());
        out
    }
}

fn advance(combo: &mut [usize], lists: &[&[(u32, u32)]]) {
    let n = combo.len();
    let mut m = 0;
    while m < n {
        combo[m] += 1;
        if combo[m] < lists[m].len() {
            return;
        }
        combo[m] = 0;
        m += 1;
    }
}

/// Builds the full synchronized product and searches for a reachable
/// accepting cycle; returns the per-member lasso or `None` when the class
/// is infeasible.
pub fn centralized_synthesize(
    specs: &[TaskSpec],
    models: &[AgentModel],
    members: &[usize],
) -> Result<Option<OracleLasso>, OracleError> {
    let (team, estimate) = size_estimate(specs, models, members);
    if estimate > SIZE_GUARD {
        return Err(OracleError::SizeGuard {
            estimate,
            team,
            limit: SIZE_GUARD,
        });
    }
    let mut p = OracleProduct {
        specs,
        models,
        members: members.to_vec(),
        states: Vec::new(),
        index: HashMap::new(),
        adj: Vec::new(),
    };
    let init = p.intern((
        members.iter().map(|&m| models[m].ts.init()).collect(),
        members.iter().map(|&m| specs[m].automaton.init()).collect(),
        1,
        false,
    ));

    // Forward BFS recording parents for prefix extraction.
    let mut parent: HashMap<u32, (u32, Box<[u32]>)> = HashMap::new();
    let mut order: Vec<u32> = vec![init];
    let mut queue = VecDeque::from([init]);
    let mut seen: HashMap<u32, ()> = HashMap::from([(init, ())]);
    while let Some(s) = queue.pop_front() {
        for (t, actions) in p.successors(s) {
            if !seen.contains_key(&t) {
                seen.insert(t, ());
                parent.insert(t, (s, actions));
                order.push(t);
                queue.push_back(t);
            }
        }
    }

    // For each reachable accepting state, search for a cycle back to it.
    let accepting: Vec<u32> = order.iter().copied().filter(|&s| p.accepting(s)).collect();
    for f in accepting {
        let mut back: HashMap<u32, (u32, Box<[u32]>)> = HashMap::new();
        let mut queue = VecDeque::from([f]);
        let mut found = false;
        let mut visited: HashMap<u32, ()> = HashMap::new();
        'bfs: while let Some(s) = queue.pop_front() {
            for (t, actions) in p.successors(s) {
                if !back.contains_key(&t) {
                    back.insert(t, (s, actions.clone()));
                }
                if t == f {
                    found = true;
                    break 'bfs;
                }
                if !visited.contains_key(&t) {
                    visited.insert(t, ());
                    queue.push_back(t);
                }
            }
        }
        if !found {
            continue;
        }
        // Reconstruct the cycle f -> ... -> f.
        let mut cycle_rev: Vec<JointStep> = Vec::new();
        let mut cur = f;
        loop {
            let (prev, actions) = back[&cur].clone();
            cycle_rev.push(JointStep { actions });
            cur = prev;
            if cur == f {
                break;
            }
        }
        cycle_rev.reverse();
        // Reconstruct the prefix init -> ... -> f.
        let mut prefix_rev: Vec<JointStep> = Vec::new();
        let mut cur = f;
        while cur != init {
            let (prev, actions) = parent[&cur].clone();
            prefix_rev.push(JointStep { actions });
            cur = prev;
        }
        prefix_rev.reverse();
        return Ok(Some(OracleLasso {
            members: members.to_vec(),
            prefix: prefix_rev,
            cycle: cycle_rev,
        }));
    }
    Ok(None)
}

impl OracleLasso {
    /// The ultimately periodic word member `m` (position in `members`)
    /// observes: its own non-silent instants sampled over the joint steps,
    /// as global service masks restricted to its task alphabet.
    pub fn member_word(
        &self,
        specs: &[TaskSpec],
        models: &[AgentModel],
        m: usize,
    ) -> (Vec<ServiceSet>, Vec<ServiceSet>) {
        let agent = self.members[m];
        let spec = &specs[agent];
        let sample = |steps: &[JointStep]| -> Vec<ServiceSet> {
            steps
                .iter()
                .filter_map(|step| {
                    let own = models[agent].label(step.actions[m]);
                    if own.is_silent() {
                        return None;
                    }
                    let mut union = 0u64;
                    for (mm, &aa) in self.members.iter().enumerate() {
                        union |= models[aa].label(step.actions[mm]).services();
                    }
                    Some(union & spec.big_mask)
                })
                .collect()
        };
        (sample(&self.prefix), sample(&self.cycle))
    }
}
