//! Deterministic, seeded discrete-event execution of the planned system:
//! stepwise or event-triggered synchronization, behavior recording,
//! priority rotation, backtracking on infeasibility, event logging and
//! metrics.

mod behavior;
mod monitor;

pub use behavior::{
    check_compatibility, check_stepwise_alignment, Behavior, CompatibilityViolation, SyncRequest,
};
pub use monitor::{monitor_local_satisfaction, MonitorReport, Verdict};

use crate::agent::Label;
use crate::planner::{Infeasible, Planner, RoundReport};
use crate::scenario::{Scenario, SyncMode};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Completed { reason: String },
    Unsatisfiable { searched_steps: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundMetrics {
    pub t: u64,
    pub class_sizes: Vec<usize>,
    pub max_h_used: usize,
    pub max_plan_h_used: usize,
    pub max_intersection_states: usize,
    pub max_product_states: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub version: u32,
    pub mode: String,
    pub seed: u64,
    /// External agent ids, index-aligned with the per-agent vectors.
    pub agents: Vec<usize>,
    /// Planning rounds executed.
    pub iterations: u64,
    /// Barrier synchronizations completed.
    pub sync_rounds: u64,
    pub sim_time: u64,
    pub accepting_visits: Vec<u64>,
    /// Start times of each agent's leading non-silent services (capped).
    pub first_service_times: Vec<Vec<u64>>,
    pub backtracks: u64,
    pub unsatisfiable: bool,
    pub stop_reason: String,
    pub rounds: Vec<RoundMetrics>,
    /// Wall-clock per planning round; isolated so logs and metrics stay
    /// byte-identical across runs unless explicitly requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<Vec<f64>>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub behaviors: Vec<Behavior>,
    /// Executed specification-state run per agent (initial state, then one
    /// entry per non-silent step).
    pub runs: Vec<Vec<u32>>,
    pub metrics: Metrics,
    pub log: Vec<Value>,
    pub outcome: Outcome,
    /// Planner working state at the end of the run (forbidden transitions
    /// included), useful for inspection in tests.
    pub planner: Planner,
}

impl RunOutput {
    pub fn log_string(&self) -> String {
        let mut out = String::new();
        for rec in &self.log {
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn run_stepwise(sc: &Scenario) -> RunOutput {
    run_with(sc, SyncMode::Stepwise, false)
}

pub fn run_event_triggered(sc: &Scenario) -> RunOutput {
    run_with(sc, SyncMode::Event, false)
}

pub fn run_with(sc: &Scenario, mode: SyncMode, wall_clock: bool) -> RunOutput {
    Sim::new(sc, mode, wall_clock).run()
}

// -------------------------------------------------------------------

/// Snapshot of everything the simulator must rewind on backtracking.
#[derive(Debug, Clone)]
struct SimMark {
    time: u64,
    priority: Vec<usize>,
    visits: Vec<u64>,
    behavior_lens: Vec<usize>,
    run_lens: Vec<usize>,
    service_lens: Vec<usize>,
    sync_sends_len: usize,
    pending_sync: Vec<u64>,
}

/// One recorded joint step: the (only, possibly silent) service exchange
/// right after a barrier, closed at the next barrier.
#[derive(Debug, Clone)]
struct HistStep {
    ts_before: Vec<u32>,
    ba_before: Vec<u32>,
    nonsilent: Vec<bool>,
    union: u64,
    ts_after: Vec<u32>,
    ba_after: Vec<u32>,
    mark: SimMark,
}

enum BarrierResult {
    Continue,
    Stopped(String),
    Unsatisfiable(usize),
}

struct Sim<'a> {
    sc: &'a Scenario,
    mode: SyncMode,
    planner: Planner,
    rng: ChaCha8Rng,
    time: u64,
    // per agent
    busy_until: Vec<Option<u64>>,
    waiting: Vec<bool>,
    pending_sync: Vec<u64>,
    last_start: Vec<u64>,
    behaviors: Vec<Behavior>,
    runs: Vec<Vec<u32>>,
    visits: Vec<u64>,
    first_services: Vec<Vec<u64>>,
    // global
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
    sync_sends: Vec<(u64, usize, usize)>, // (time, agent, group)
    history: Vec<HistStep>,
    open_step: Option<usize>,
    log: Vec<Value>,
    metrics_rounds: Vec<RoundMetrics>,
    wall_clock: Option<Vec<f64>>,
    iterations: u64,
    sync_rounds: u64,
    backtracks: u64,
}

impl<'a> Sim<'a> {
    fn new(sc: &'a Scenario, mode: SyncMode, wall_clock: bool) -> Self {
        let n = sc.models.len();
        let planner = Planner::new(
            sc.tasks.clone(),
            &sc.models,
            sc.config.spec_horizon,
            sc.config.plan_horizon,
        );
        let groups: Vec<Vec<usize>> = if sc.config.param_sync {
            crate::planner::offline_classes(&sc.tasks).classes
        } else {
            vec![(0..n).collect()]
        };
        let mut group_of = vec![0usize; n];
        for (g, members) in groups.iter().enumerate() {
            for &m in members {
                group_of[m] = g;
            }
        }
        let behaviors = sc
            .models
            .iter()
            .map(|m| Behavior {
                agent: m.id,
                states: vec![m.ts.init()],
                ..Behavior::default()
            })
            .collect();
        let runs = sc.tasks.iter().map(|t| vec![t.automaton.init()]).collect();
        Sim {
            sc,
            mode,
            planner,
            rng: ChaCha8Rng::seed_from_u64(sc.config.seed),
            time: 0,
            busy_until: vec![None; n],
            waiting: vec![false; n],
            pending_sync: vec![0; n],
            last_start: vec![0; n],
            behaviors,
            runs,
            visits: vec![0; n],
            first_services: vec![Vec::new(); n],
            groups,
            group_of,
            sync_sends: Vec::new(),
            history: Vec::new(),
            open_step: None,
            log: Vec::new(),
            metrics_rounds: Vec::new(),
            wall_clock: wall_clock.then(Vec::new),
            iterations: 0,
            sync_rounds: 0,
            backtracks: 0,
        }
    }

    fn n(&self) -> usize {
        self.sc.models.len()
    }

    fn scope_of(&self, group: usize) -> Option<Vec<usize>> {
        if self.sc.config.param_sync {
            Some(self.groups[group].clone())
        } else {
            None
        }
    }

    fn run(mut self) -> RunOutput {
        self.log.push(json!({
            "t": 0,
            "agent": null,
            "kind": "header",
            "payload": {
                "version": 1,
                "mode": self.mode.to_string(),
                "seed": self.sc.config.seed,
                "param_sync": self.sc.config.param_sync,
                "agents": self.sc.models.iter().map(|m| m.id).collect::<Vec<_>>(),
            }
        }));
        // Initial synchronization of everyone at t = 0.
        for agent in 0..self.n() {
            self.send_sync(agent, 0);
        }

        let outcome = loop {
            match self.resolve_barriers() {
                BarrierResult::Continue => {}
                BarrierResult::Stopped(reason) => break Outcome::Completed { reason },
                BarrierResult::Unsatisfiable(searched) => {
                    break Outcome::Unsatisfiable {
                        searched_steps: searched,
                    }
                }
            }
            let Some((t, agent)) = self.next_completion() else {
                break Outcome::Completed {
                    reason: "idle".into(),
                };
            };
            self.time = t;
            self.complete_action(agent);
        };

        self.log.push(json!({
            "t": self.time,
            "agent": null,
            "kind": "stop",
            "payload": &outcome,
        }));

        let metrics = Metrics {
            version: 1,
            mode: self.mode.to_string(),
            seed: self.sc.config.seed,
            agents: self.sc.models.iter().map(|m| m.id).collect(),
            iterations: self.iterations,
            sync_rounds: self.sync_rounds,
            sim_time: self.time,
            accepting_visits: self.visits.clone(),
            first_service_times: self.first_services.clone(),
            backtracks: self.backtracks,
            unsatisfiable: matches!(outcome, Outcome::Unsatisfiable { .. }),
            stop_reason: match &outcome {
                Outcome::Completed { reason } => reason.clone(),
                Outcome::Unsatisfiable { .. } => "unsatisfiable".into(),
            },
            rounds: self.metrics_rounds.clone(),
            wall_clock_ms: self.wall_clock.clone(),
        };
        RunOutput {
            behaviors: self.behaviors,
            runs: self.runs,
            metrics,
            log: self.log,
            outcome,
            planner: self.planner,
        }
    }

    fn next_completion(&self) -> Option<(u64, usize)> {
        let mut best: Option<(u64, usize)> = None;
        for (agent, t) in self.busy_until.iter().enumerate() {
            if let Some(t) = t {
                if best.map_or(true, |(bt, _)| *t < bt) {
                    best = Some((*t, agent));
                }
            }
        }
        best
    }

    fn send_sync(&mut self, agent: usize, t: u64) {
        self.pending_sync[agent] = t;
        self.waiting[agent] = true;
        self.busy_until[agent] = None;
        self.sync_sends.push((t, agent, self.group_of[agent]));
        self.log.push(json!({
            "t": t,
            "agent": self.sc.models[agent].id,
            "kind": "sync",
            "payload": {}
        }));
    }

    fn resolve_barriers(&mut self) -> BarrierResult {
        loop {
            let Some(group) = (0..self.groups.len())
                .find(|&g| self.groups[g].iter().all(|&a| self.waiting[a]))
            else {
                return BarrierResult::Continue;
            };
            match self.barrier(group) {
                BarrierResult::Continue => continue,
                other => return other,
            }
        }
    }

    /// All members of `group` are waiting: close the open history step,
    /// check the stop criterion, replan, and dispatch first actions.
    fn barrier(&mut self, group: usize) -> BarrierResult {
        let t = self.time;
        self.sync_rounds += 1;

        if !self.sc.config.param_sync {
            if let Some(k) = self.open_step.take() {
                self.history[k].ts_after = self.planner.ts_state.clone();
                self.history[k].ba_after = self.planner.ba_state.clone();
                self.elide_cycles();
            }
        }

        let stop = &self.sc.config.stop;
        if stop.visits > 0 && self.visits.iter().all(|&v| v >= stop.visits as u64) {
            return BarrierResult::Stopped("visits".into());
        }
        if self.iterations >= stop.max_iters {
            return BarrierResult::Stopped("max_iters".into());
        }
        if stop.max_time > 0 && t >= stop.max_time {
            return BarrierResult::Stopped("max_time".into());
        }

        let started = std::time::Instant::now();
        let scope = if self.sc.config.param_sync {
            Some(self.groups[group].clone())
        } else {
            None
        };
        let result = self.plan_scoped(scope.as_deref());
        if let Some(w) = &mut self.wall_clock {
            w.push(started.elapsed().as_secs_f64() * 1e3);
        }
        match result {
            Ok(report) => {
                self.iterations += 1;
                self.note_round(t, &report);
                self.dispatch(group, t);
                BarrierResult::Continue
            }
            Err(inf) => {
                self.log.push(json!({
                    "t": t,
                    "agent": null,
                    "kind": "backtrack",
                    "payload": {
                        "phase": "infeasible",
                        "class": inf.class.iter().map(|&a| self.sc.models[a].id).collect::<Vec<_>>(),
                    }
                }));
                if self.sc.config.param_sync {
                    // Parametrized synchronization does not attempt
                    // backtracking; report the stuck class directly.
                    return BarrierResult::Unsatisfiable(0);
                }
                match self.backtrack() {
                    Ok(()) => BarrierResult::Continue,
                    Err(searched) => BarrierResult::Unsatisfiable(searched),
                }
            }
        }
    }

    fn plan_scoped(&mut self, scope: Option<&[usize]>) -> Result<RoundReport, Infeasible> {
        match scope {
            None => self.planner.short_horizon_plan(&self.sc.models),
            Some(members) => self
                .planner
                .short_horizon_plan_scoped(&self.sc.models, members),
        }
    }

    fn note_round(&mut self, t: u64, report: &RoundReport) {
        self.log.push(json!({
            "t": t,
            "agent": null,
            "kind": "plan",
            "payload": report,
        }));
        self.metrics_rounds.push(RoundMetrics {
            t,
            class_sizes: report.partition.iter().map(|c| c.len()).collect(),
            max_h_used: report.classes.iter().map(|c| c.h_used).max().unwrap_or(0),
            max_plan_h_used: report
                .classes
                .iter()
                .map(|c| c.plan_h_used)
                .max()
                .unwrap_or(0),
            max_intersection_states: report
                .classes
                .iter()
                .map(|c| c.intersection_states)
                .max()
                .unwrap_or(0),
            max_product_states: report
                .classes
                .iter()
                .map(|c| c.product_states)
                .max()
                .unwrap_or(0),
        });
    }

    fn mark(&self) -> SimMark {
        SimMark {
            time: self.time,
            priority: self.planner.priority.clone(),
            visits: self.visits.clone(),
            behavior_lens: self.behaviors.iter().map(|b| b.len()).collect(),
            run_lens: self.runs.iter().map(|r| r.len()).collect(),
            service_lens: self.first_services.iter().map(|s| s.len()).collect(),
            sync_sends_len: self.sync_sends.len(),
            pending_sync: self.pending_sync.clone(),
        }
    }

    /// Starts the first planned action of every member of `group` at
    /// barrier time `t` and opens the corresponding history step.
    fn dispatch(&mut self, group: usize, t: u64) {
        let mark = self.mark();
        let members = self.groups[group].clone();
        let mut nonsilent = vec![false; self.n()];
        let mut union = 0u64;
        let ts_before = self.planner.ts_state.clone();
        let ba_before = self.planner.ba_state.clone();
        let scope = self.scope_of(group);
        for &agent in &members {
            let (ns, services) =
                self.start_next_action(agent, t, SyncRequest::Sync { scope: scope.clone() });
            nonsilent[agent] = ns;
            union |= services;
        }
        if !self.sc.config.param_sync {
            self.history.push(HistStep {
                ts_before,
                ba_before,
                nonsilent,
                union,
                ts_after: Vec::new(),
                ba_after: Vec::new(),
                mark,
            });
            self.open_step = Some(self.history.len() - 1);
        }
    }

    /// Starts the agent's next planned step at time `t` with the given
    /// request; returns (non-silent?, provided services).
    fn start_next_action(&mut self, agent: usize, t: u64, request: SyncRequest) -> (bool, u64) {
        let step = self
            .planner
            .next_step(agent)
            .expect("planned fragment is nonempty at dispatch");
        self.planner.commit_step(agent);
        let model = &self.sc.models[agent];
        let label = model.label(step.action);
        let (lo, hi) = self.sc.config.durations[agent];
        let duration = self.rng.gen_range(lo..=hi);

        let from_state = *self.behaviors[agent].states.last().expect("initial state");
        let b = &mut self.behaviors[agent];
        b.actions.push(step.action);
        b.labels.push(label);
        b.requests.push(request);
        b.t_sync.push(self.pending_sync[agent]);
        b.t_action.push(t);
        b.states.push(step.ts_next);

        self.last_start[agent] = t;
        self.busy_until[agent] = Some(t + duration);
        self.waiting[agent] = false;

        let ext = model.id;
        self.log.push(json!({
            "t": t,
            "agent": ext,
            "kind": "action",
            "payload": {
                "action": model.ts.action(step.action).name,
                "from": model.ts.state_name(from_state),
                "to": model.ts.state_name(step.ts_next),
                "duration": duration,
            }
        }));

        let mut services = 0u64;
        if let Label::Provide(mask) = label {
            services = mask;
            self.runs[agent].push(step.ba_next);
            if self.first_services[agent].len() < self.sc.config.report_first_k {
                self.first_services[agent].push(t);
            }
            self.log.push(json!({
                "t": t,
                "agent": ext,
                "kind": "service",
                "payload": { "services": self.sc.services.mask_names(mask) }
            }));
            if self.sc.tasks[agent].automaton.is_accepting(step.ba_next) {
                self.visits[agent] += 1;
                self.log.push(json!({
                    "t": t,
                    "agent": ext,
                    "kind": "accept",
                    "payload": { "visits": self.visits[agent] }
                }));
            }
        }
        // Priority rotation fires whenever the current specification state
        // is accepting, silent self-transitions included.
        if self.sc.tasks[agent].automaton.is_accepting(step.ba_next) {
            self.planner.note_accepting_visit(agent);
        }
        (!label.is_silent(), services)
    }

    fn complete_action(&mut self, agent: usize) {
        let t = self.time;
        self.busy_until[agent] = None;
        if self.mode == SyncMode::Stepwise {
            self.send_sync(agent, t);
            return;
        }
        // Event-triggered: keep running silently while allowed.
        let can_continue = match self.planner.next_step(agent) {
            Some(step) => {
                let silent = self.sc.models[agent].label(step.action).is_silent();
                let accepting = self.sc.tasks[agent]
                    .automaton
                    .is_accepting(self.planner.ba_state[agent]);
                let received = self.sync_received_since(agent, self.last_start[agent], t);
                silent && !accepting && !received
            }
            None => false,
        };
        if can_continue {
            self.pending_sync[agent] = t;
            self.log.push(json!({
                "t": t,
                "agent": self.sc.models[agent].id,
                "kind": "nosync",
                "payload": {}
            }));
            self.start_next_action(agent, t, SyncRequest::NoSync);
        } else {
            self.send_sync(agent, t);
        }
    }

    /// A sync request from a covered peer arrived in `(lo, hi]`.
    fn sync_received_since(&self, agent: usize, lo: u64, hi: u64) -> bool {
        self.sync_sends.iter().any(|&(t, sender, group)| {
            sender != agent
                && t > lo
                && t <= hi
                && (!self.sc.config.param_sync || group == self.group_of[agent])
        })
    }

    // -- backtracking ------------------------------------------------

    fn elide_cycles(&mut self) {
        let Some(last) = self.history.last() else {
            return;
        };
        let snap = (last.ts_after.clone(), last.ba_after.clone());
        for j in 0..self.history.len() - 1 {
            let prev = &self.history[j];
            if prev.ts_after == snap.0 && prev.ba_after == snap.1 {
                self.history.truncate(j + 1);
                return;
            }
        }
        // Also compare against the pre-execution snapshot of the first step.
        if let Some(first) = self.history.first() {
            if first.ts_before == snap.0 && first.ba_before == snap.1 {
                self.history.clear();
            }
        }
    }

    /// Walks the execution history backwards, first re-resolving
    /// specification nondeterminism, then forbidding executed joint
    /// service sets, replanning after each change. Restores the simulator
    /// to the chosen resume point on success.
    fn backtrack(&mut self) -> Result<(), usize> {
        let cur_mark = self.mark();
        let mut searched = 0usize;
        for k in (0..self.history.len()).rev() {
            searched += 1;
            let step = self.history[k].clone();
            // (a) different nondeterministic resolution of the same step
            let alts = self.planner.alternative_resolutions(
                &step.ba_before,
                &step.nonsilent,
                step.union,
                &step.ba_after,
            );
            for alt in alts {
                let resume_mark = if k + 1 < self.history.len() {
                    self.history[k + 1].mark.clone()
                } else {
                    cur_mark.clone()
                };
                self.restore(&resume_mark);
                self.planner.reset_to(&step.ts_after, &alt);
                if let Ok(report) = self.planner.short_horizon_plan(&self.sc.models) {
                    // Rewrite the executed run's tail to the new resolution
                    // and recount its accepting visits.
                    for (i, &ns) in step.nonsilent.iter().enumerate() {
                        if ns {
                            *self.runs[i].last_mut().expect("non-silent step recorded") = alt[i];
                            self.visits[i] = self.runs[i][1..]
                                .iter()
                                .filter(|&&q| self.sc.tasks[i].automaton.is_accepting(q))
                                .count() as u64;
                        }
                    }
                    self.history.truncate(k + 1);
                    self.history[k].ba_after = alt;
                    self.backtracks += 1;
                    self.resume_after_backtrack(report, "alternative");
                    return Ok(());
                }
            }
            // (b) forbid the executed joint service set at this step
            self.planner
                .forbid_step(&step.ba_before, &step.nonsilent, step.union);
            self.restore(&step.mark);
            self.planner.reset_to(&step.ts_before, &step.ba_before);
            if let Ok(report) = self.planner.short_horizon_plan(&self.sc.models) {
                self.history.truncate(k);
                self.backtracks += 1;
                self.resume_after_backtrack(report, "forbid");
                return Ok(());
            }
        }
        Err(searched)
    }

    fn restore(&mut self, mark: &SimMark) {
        self.time = mark.time;
        self.planner.priority = mark.priority.clone();
        self.visits = mark.visits.clone();
        for (agent, b) in self.behaviors.iter_mut().enumerate() {
            let n = mark.behavior_lens[agent];
            b.states.truncate(n + 1);
            b.actions.truncate(n);
            b.labels.truncate(n);
            b.requests.truncate(n);
            b.t_sync.truncate(n);
            b.t_action.truncate(n);
            self.runs[agent].truncate(mark.run_lens[agent]);
            self.first_services[agent].truncate(mark.service_lens[agent]);
        }
        self.sync_sends.truncate(mark.sync_sends_len);
        self.pending_sync = mark.pending_sync.clone();
        self.busy_until = vec![None; self.n()];
        self.waiting = vec![true; self.n()];
        self.open_step = None;
    }

    fn resume_after_backtrack(&mut self, report: RoundReport, how: &str) {
        let t = self.time;
        self.log.push(json!({
            "t": t,
            "agent": null,
            "kind": "backtrack",
            "payload": { "phase": how, "depth": self.history.len() }
        }));
        self.iterations += 1;
        self.note_round(t, &report);
        self.dispatch(0, t);
    }
}
