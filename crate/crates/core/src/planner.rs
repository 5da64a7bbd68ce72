//! Receding-horizon planning: per-round dependency partitioning,
//! intersection/product construction with horizon extension, progressive
//! target selection, and the bookkeeping shared with the executors.

use crate::agent::{AgentModel, TaskSpec};
use crate::dependency::{dynamic_partition_with, DependencyPartition};
use crate::intersection::{build_intersection, Progress};
use crate::product::build_product;
use crate::sym::ServiceSet;
use std::collections::{HashMap, VecDeque};

/// One planned joint step of an agent: the action to execute and the
/// system/specification states it leads to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStep {
    pub action: u32,
    pub ts_next: u32,
    pub ba_next: u32,
}

/// Per-class outcome of a planning round, for logs and metrics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassReport {
    /// External agent ids, class priority order.
    pub members: Vec<usize>,
    pub h_used: usize,
    pub h_extended: bool,
    pub plan_h_used: usize,
    pub plan_h_extended: bool,
    pub replanned: bool,
    pub path_len: usize,
    pub target_k: u32,
    pub target_negdist: i64,
    pub intersection_states: usize,
    pub product_states: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RoundReport {
    /// External agent ids per class.
    pub partition: Vec<Vec<usize>>,
    pub classes: Vec<ClassReport>,
}

/// A class for which no plan exists even after exhausting horizon
/// extensions; the executor reacts by backtracking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasible {
    /// Internal indices of the stuck class.
    pub class: Vec<usize>,
}

enum ClassFailure {
    /// The intersection saturated without accepting states at depth `h`.
    SpecSaturated { h: usize },
    /// The product saturated (or hit its cap) without a usable target.
    PlanSaturated,
}

#[derive(Debug, Clone, Default)]
struct AgentPlan {
    steps: VecDeque<PlanStep>,
}

/// Planner state shared across rounds: working copies of the
/// specification automata (service forbidding mutates them), the priority
/// ordering, current states, remaining fragments and per-class maximal
/// progressive values.
#[derive(Debug, Clone)]
pub struct Planner {
    pub specs: Vec<TaskSpec>,
    /// Internal agent indices, highest priority first.
    pub priority: Vec<usize>,
    pub ts_state: Vec<u32>,
    pub ba_state: Vec<u32>,
    plans: Vec<AgentPlan>,
    vmax: HashMap<Vec<usize>, Progress>,
    prev_classes: Vec<Vec<usize>>,
    pub spec_horizon: usize,
    pub plan_horizon: usize,
}

impl Planner {
    pub fn new(
        specs: Vec<TaskSpec>,
        models: &[AgentModel],
        spec_horizon: usize,
        plan_horizon: usize,
    ) -> Self {
        let n = specs.len();
        let ts_state = models.iter().map(|m| m.ts.init()).collect();
        let ba_state = specs.iter().map(|s| s.automaton.init()).collect();
        Planner {
            specs,
            priority: (0..n).collect(),
            ts_state,
            ba_state,
            plans: vec![AgentPlan::default(); n],
            vmax: HashMap::new(),
            prev_classes: Vec::new(),
            spec_horizon,
            plan_horizon,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.specs.len()
    }

    pub fn next_step(&self, agent: usize) -> Option<PlanStep> {
        self.plans[agent].steps.front().copied()
    }

    pub fn remaining(&self, agent: usize) -> usize {
        self.plans[agent].steps.len()
    }

    /// Pops the agent's next planned step and advances its bookkeeping.
    pub fn commit_step(&mut self, agent: usize) -> PlanStep {
        let step = self.plans[agent]
            .steps
            .pop_front()
            .expect("agent has a planned step");
        self.ts_state[agent] = step.ts_next;
        self.ba_state[agent] = step.ba_next;
        step
    }

    /// Moves `agent` to the lowest priority, keeping the relative order of
    /// the others, and resets the progressive-value memory of its class.
    pub fn note_accepting_visit(&mut self, agent: usize) {
        self.priority.retain(|&a| a != agent);
        self.priority.push(agent);
        let key: Option<Vec<usize>> = self
            .prev_classes
            .iter()
            .find(|c| c.contains(&agent))
            .cloned();
        if let Some(key) = key {
            self.vmax.insert(key, Progress::ZERO);
        }
    }

    /// One planning round: recompute the dependency partition and, per
    /// class, rebuild the horizon constructions and install fragments when
    /// a strictly better target exists.
    pub fn short_horizon_plan(
        &mut self,
        models: &[AgentModel],
    ) -> Result<RoundReport, Infeasible> {
        self.plan_internal(models, None)
    }

    /// Planning round restricted to classes fully inside `scope` (used by
    /// parametrized synchronization, where only one offline class is at
    /// the barrier). Dynamic classes never straddle offline classes, so
    /// the restriction is a plain filter.
    pub fn short_horizon_plan_scoped(
        &mut self,
        models: &[AgentModel],
        scope: &[usize],
    ) -> Result<RoundReport, Infeasible> {
        self.plan_internal(models, Some(scope))
    }

    fn plan_internal(
        &mut self,
        models: &[AgentModel],
        scope: Option<&[usize]>,
    ) -> Result<RoundReport, Infeasible> {
        // Horizon extension can reveal participation the base-horizon
        // partition missed (a specification needs a partner's service
        // several steps past the horizon). When a class saturates without
        // accepting states, re-evaluate its coupling at the saturation
        // depth and merge in newly participating agents; only a class that
        // saturates with no new partners is infeasible.
        let mut extra: Vec<(usize, usize)> = Vec::new();
        'repartition: loop {
            let partition = dynamic_partition_with(
                &self.specs,
                models,
                &self.ba_state,
                self.spec_horizon,
                &self.priority,
                &extra,
            );
            let in_scope = |class: &[usize]| match scope {
                None => true,
                Some(scope) => class.iter().all(|a| scope.contains(a)),
            };
            let mut report = RoundReport {
                partition: partition
                    .classes
                    .iter()
                    .filter(|c| in_scope(c))
                    .map(|c| c.iter().map(|&a| models[a].id).collect())
                    .collect(),
                classes: Vec::new(),
            };
            let mut new_classes: Vec<Vec<usize>> = self
                .prev_classes
                .iter()
                .filter(|c| !in_scope(c))
                .cloned()
                .collect();
            for class in &partition.classes {
                if !in_scope(class) {
                    continue;
                }
                match self.plan_class(models, class) {
                    Ok(entry) => {
                        report.classes.push(entry);
                        new_classes.push(sorted(class));
                    }
                    Err(ClassFailure::SpecSaturated { .. } | ClassFailure::PlanSaturated) => {
                        // Participation is monotone in the horizon, so one
                        // evaluation at the full automaton depth finds every
                        // partner that could ever matter for this class.
                        let mut partners: Vec<usize> = Vec::new();
                        for &member in class {
                            let deep = self.specs[member].automaton.n_states();
                            for agent in crate::dependency::horizon_alphabet(
                                &self.specs[member],
                                models,
                                self.ba_state[member],
                                deep,
                            ) {
                                if !class.contains(&agent) && !partners.contains(&agent) {
                                    partners.push(agent);
                                }
                            }
                        }
                        if partners.is_empty() {
                            return Err(Infeasible {
                                class: class.to_vec(),
                            });
                        }
                        for p in partners {
                            extra.push((class[0], p));
                        }
                        continue 'repartition;
                    }
                }
            }
            self.prev_classes = new_classes;
            return Ok(report);
        }
    }

    fn plan_class(
        &mut self,
        models: &[AgentModel],
        class: &[usize],
    ) -> Result<ClassReport, ClassFailure> {
        let key = sorted(class);
        // Progressive-value memory survives only while the class keeps its
        // member set; fragments must also still be in lockstep (equal
        // nonempty remainders), otherwise the memory is reset and the
        // round replans.
        let carried = self.prev_classes.contains(&key);
        let lens: Vec<usize> = class.iter().map(|&a| self.remaining(a)).collect();
        let aligned = lens.iter().all(|&l| l == lens[0]) && lens[0] > 0;
        let vmax = if carried && aligned {
            *self.vmax.get(&key).unwrap_or(&Progress::ZERO)
        } else {
            Progress::ZERO
        };

        // Unroll the intersection; extend its horizon until an accepting
        // state appears or the construction reaches a fixpoint.
        let mut a = build_intersection(&self.specs, models, class, &self.ba_state, self.spec_horizon);
        let mut h_used = self.spec_horizon;
        while !a.has_accepting() {
            let before = (a.n_states(), a.n_edges());
            a.extend_to(&self.specs, h_used + 1);
            h_used += 1;
            if (a.n_states(), a.n_edges()) == before {
                return Err(ClassFailure::SpecSaturated { h: h_used });
            }
        }
        a.prune_nonprogressing();

        // Unroll the product; extend until a progressive state is
        // reachable with a non-silent step of the top-priority member.
        let plan_cap = class
            .iter()
            .map(|&m| models[m].ts.n_states())
            .max()
            .unwrap_or(1)
            * (h_used + 1);
        let mut plan_h = self.plan_horizon;
        let mut p = build_product(&self.specs, models, &a, &self.ts_state, plan_h);
        let mut target = p.find_max_progressive_flagged();
        while target.is_none() {
            if plan_h >= plan_cap {
                return Err(ClassFailure::PlanSaturated);
            }
            let before = p.n_states();
            plan_h += 1;
            p = build_product(&self.specs, models, &a, &self.ts_state, plan_h);
            target = p.find_max_progressive_flagged();
            if target.is_none() && p.n_states() == before {
                // Saturated: deeper horizons cannot reveal anything new.
                return Err(ClassFailure::PlanSaturated);
            }
        }
        let target = target.expect("loop exits with a target");
        let value = p.value(target);

        let mut entry = ClassReport {
            members: class.iter().map(|&a| models[a].id).collect(),
            h_used,
            h_extended: h_used > self.spec_horizon,
            plan_h_used: plan_h,
            plan_h_extended: plan_h > self.plan_horizon,
            replanned: false,
            path_len: 0,
            target_k: value.k,
            target_negdist: value.negdist,
            intersection_states: a.n_retained(),
            product_states: p.n_states(),
        };

        if value > vmax {
            let path = p.flagged_path_to(target);
            entry.path_len = path.len();
            entry.replanned = true;
            let frag = p.project(&a, models, &path);
            for (m, &agent) in frag.members.iter().enumerate() {
                let steps: VecDeque<PlanStep> = (0..frag.actions[m].len())
                    .map(|j| PlanStep {
                        action: frag.actions[m][j],
                        ts_next: frag.ts_states[m][j + 1],
                        ba_next: frag.ba_states[m][j + 1],
                    })
                    .collect();
                self.plans[agent].steps = steps;
            }
            self.vmax.insert(key, value);
        } else {
            entry.path_len = lens[0];
            self.vmax.insert(key, vmax);
        }
        Ok(entry)
    }

    /// Forgets fragments and value memory and repositions the planner at
    /// the given system/specification states (backtracking support).
    pub fn reset_to(&mut self, ts: &[u32], ba: &[u32]) {
        self.ts_state.copy_from_slice(ts);
        self.ba_state.copy_from_slice(ba);
        for p in &mut self.plans {
            p.steps.clear();
        }
        self.vmax.clear();
        self.prev_classes.clear();
    }

    /// Alternative nondeterministic resolutions of one executed step: each
    /// candidate differs from the recorded successor vector in exactly one
    /// non-silent agent.
    pub fn alternative_resolutions(
        &self,
        ba_before: &[u32],
        nonsilent: &[bool],
        union: ServiceSet,
        recorded: &[u32],
    ) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for (i, spec) in self.specs.iter().enumerate() {
            if !nonsilent[i] {
                continue;
            }
            let local = spec.local_symbol(union);
            let mut succs = Vec::new();
            spec.automaton
                .for_each_successor(ba_before[i], local, |t| succs.push(t));
            for s in succs {
                if s != recorded[i] {
                    let mut alt = recorded.to_vec();
                    alt[i] = s;
                    out.push(alt);
                }
            }
        }
        out
    }

    /// Forbids the executed joint service set at the given specification
    /// states: deletes, in every non-silent agent's automaton, the
    /// transitions consuming that symbol there. Persists for the rest of
    /// the run.
    pub fn forbid_step(&mut self, ba_before: &[u32], nonsilent: &[bool], union: ServiceSet) {
        for (i, spec) in self.specs.iter_mut().enumerate() {
            if !nonsilent[i] {
                continue;
            }
            let local = spec.local_symbol(union);
            spec.automaton.remove_symbol_at(ba_before[i], local);
        }
    }
}

fn sorted(class: &[usize]) -> Vec<usize> {
    let mut v = class.to_vec();
    v.sort_unstable();
    v
}

/// Suggested horizons from the models alone: the specification depth
/// defaults to 3; the planning depth is the median over agents of the
/// closest distance between two distinct non-silently labeled actions.
/// Both are clamped to at least 1.
pub fn suggest_horizons(models: &[AgentModel]) -> (usize, usize) {
    let mut per_agent: Vec<usize> = Vec::new();
    for m in models {
        let nonsilent: Vec<u32> = (0..m.ts.actions().len() as u32)
            .filter(|&a| !m.ts.action(a).label.is_silent())
            .collect();
        let mut best: Option<usize> = None;
        for (i, &a) in nonsilent.iter().enumerate() {
            for &b in &nonsilent[i + 1..] {
                for &sa in &m.ts.states_with_action(a) {
                    for &sb in &m.ts.states_with_action(b) {
                        let d = m
                            .ts
                            .dist(sa, sb)
                            .into_iter()
                            .chain(m.ts.dist(sb, sa))
                            .min();
                        if let Some(d) = d {
                            best = Some(best.map_or(d, |x: usize| x.min(d)));
                        }
                    }
                }
            }
        }
        per_agent.push(best.unwrap_or(0));
    }
    per_agent.sort_unstable();
    let median = if per_agent.is_empty() {
        0
    } else {
        per_agent[(per_agent.len() - 1) / 2]
    };
    (3, median.max(1))
}

/// Partition of the agents ignoring current states: the closure of the
/// declared dependency sets.
pub fn offline_classes(specs: &[TaskSpec]) -> DependencyPartition {
    let priority: Vec<usize> = (0..specs.len()).collect();
    crate::dependency::offline_partition(specs, &priority)
}
