//! Scenario documents: agents (explicit transition systems or grid
//! workspaces), tasks, and simulation configuration.

use crate::agent::{owners_of_mask, AgentModel, Label, ModelError, TaskSpec, TransitionSystem};
use crate::buchi::ltl_to_buchi;
use crate::grid::{build_grid_world, GridSpec};
use crate::ltl::{parse_ltl, Formula};
use crate::sym::{Alphabet, ServiceTable, DEFAULT_ALPHABET_CAP, MAX_PROPS};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario schema: {0}")]
    Schema(String),
    #[error("task {agent}: {err}")]
    Formula { agent: usize, err: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn schema(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyncMode {
    Stepwise,
    Event,
}

impl std::fmt::Display for SyncMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SyncMode::Stepwise => write!(f, "stepwise"),
            SyncMode::Event => write!(f, "event"),
        }
    }
}

/// Run termination: every agent reached `visits` accepting visits, or
/// `max_iters` planning rounds, or simulation time `max_time` (0 = off),
/// whichever first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopCriterion {
    pub visits: u32,
    pub max_iters: u64,
    pub max_time: u64,
}

impl Default for StopCriterion {
    fn default() -> Self {
        Self {
            visits: 3,
            max_iters: 10_000,
            max_time: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    /// Specification-automaton planning depth (per round, before extension).
    pub spec_horizon: usize,
    /// Transition-system planning depth (per round, before extension).
    pub plan_horizon: usize,
    pub alphabet_cap: usize,
    pub seed: u64,
    pub mode: SyncMode,
    /// Scope sync requests to the offline dependency class instead of the
    /// whole team.
    pub param_sync: bool,
    pub stop: StopCriterion,
    /// How many leading non-silent services to report per agent.
    pub report_first_k: usize,
    /// Inclusive duration range per internal agent index; draws are
    /// integers >= 1.
    pub durations: Vec<(u64, u64)>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub services: ServiceTable,
    /// Agents sorted by external id; internal index = position.
    pub models: Vec<AgentModel>,
    /// One task per agent, same order.
    pub tasks: Vec<TaskSpec>,
    pub config: SimConfig,
}

// ---------------------------------------------------------------------
// Raw document shape
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    #[serde(default)]
    version: Option<u32>,
    #[serde(default)]
    config: RawConfig,
    #[serde(default)]
    duration: Option<RawDuration>,
    #[serde(default)]
    agent: BTreeMap<String, RawAgent>,
    #[serde(default)]
    task: BTreeMap<String, RawTask>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    h: Option<usize>,
    #[serde(rename = "H")]
    big_h: Option<usize>,
    alphabet_cap: Option<usize>,
    seed: Option<u64>,
    mode: Option<SyncMode>,
    param_sync: Option<bool>,
    stop_visits: Option<u32>,
    stop_max_iters: Option<u64>,
    stop_max_time: Option<u64>,
    report_first_k: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDuration {
    lo: u64,
    hi: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    // grid form
    #[serde(default)]
    grid: Option<RawGrid>,
    #[serde(default)]
    start: Option<[u16; 2]>,
    #[serde(default)]
    services: Option<Vec<RawService>>,
    // explicit form
    #[serde(default)]
    states: Option<Vec<String>>,
    #[serde(default)]
    init: Option<String>,
    #[serde(default)]
    actions: Option<Vec<RawAction>>,
    #[serde(default)]
    transitions: Option<Vec<RawTransition>>,
    #[serde(default)]
    duration: Option<RawDuration>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    width: u16,
    height: u16,
    #[serde(default)]
    walls: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CellsSpec {
    One([u16; 2]),
    Many(Vec<[u16; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawService {
    #[serde(default)]
    at: Option<CellsSpec>,
    /// Inclusive cell rectangle `[x0, y0, x1, y1]`.
    #[serde(default)]
    rect: Option<[u16; 4]>,
    provide: Vec<String>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    name: String,
    #[serde(default)]
    silent: bool,
    #[serde(default)]
    provide: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    action: String,
    from: String,
    to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    formula: String,
    #[serde(default)]
    depends: Option<Vec<usize>>,
}

// ---------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    load_scenario_str(&text)
}

pub fn load_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: RawDoc = toml::from_str(text).map_err(|e| schema(e.to_string()))?;
    if let Some(v) = doc.version {
        if v != 1 {
            return Err(schema(format!("unsupported scenario version {v}")));
        }
    }

    let mut ids: Vec<usize> = Vec::new();
    for key in doc.agent.keys() {
        let id: usize = key
            .parse()
            .map_err(|_| schema(format!("agent key `{key}` is not a positive integer")))?;
        ids.push(id);
    }
    ids.sort_unstable();
    if ids.is_empty() {
        return Err(schema("scenario declares no agents"));
    }

    // First pass: register services agent by agent so global bit order is
    // (agent, declaration order).
    let mut services = ServiceTable::new();
    let mut per_agent_service_masks: Vec<Vec<(Vec<(u16, u16)>, u64, String)>> = Vec::new();
    let mut explicit_action_labels: Vec<BTreeMap<String, Label>> = Vec::new();
    for (internal, id) in ids.iter().enumerate() {
        let raw = &doc.agent[&id.to_string()];
        let mut grid_services = Vec::new();
        let mut labels = BTreeMap::new();
        if let Some(list) = &raw.services {
            for (k, svc) in list.iter().enumerate() {
                let mut mask = 0u64;
                for name in &svc.provide {
                    let bit = services
                        .register(name, internal)
                        .map_err(ModelError::AlphabetOverlap)?;
                    mask |= 1 << bit;
                }
                let mut cells: Vec<(u16, u16)> = Vec::new();
                match &svc.at {
                    Some(CellsSpec::One([x, y])) => cells.push((*x, *y)),
                    Some(CellsSpec::Many(v)) => cells.extend(v.iter().map(|c| (c[0], c[1]))),
                    None => {}
                }
                if let Some([x0, y0, x1, y1]) = svc.rect {
                    for y in y0..=y1 {
                        for x in x0..=x1 {
                            cells.push((x, y));
                        }
                    }
                }
                if cells.is_empty() {
                    return Err(schema(format!(
                        "agent {id}: service entry {k} names no cells"
                    )));
                }
                let name = svc.name.clone().unwrap_or_else(|| {
                    if svc.provide.is_empty() {
                        format!("svc_none{k}")
                    } else {
                        format!("svc_{}", svc.provide.join("_"))
                    }
                });
                grid_services.push((cells, mask, name));
            }
        }
        if let Some(actions) = &raw.actions {
            for a in actions {
                let label = match (&a.silent, &a.provide) {
                    (true, None) => Label::Silent,
                    (false, Some(list)) => {
                        let mut mask = 0u64;
                        for name in list {
                            let bit = services
                                .register(name, internal)
                                .map_err(ModelError::AlphabetOverlap)?;
                            mask |= 1 << bit;
                        }
                        Label::Provide(mask)
                    }
                    _ => {
                        return Err(schema(format!(
                            "agent {id}: action `{}` must be silent xor provide",
                            a.name
                        )))
                    }
                };
                if labels.insert(a.name.clone(), label).is_some() {
                    return Err(schema(format!(
                        "agent {id}: duplicate action `{}`",
                        a.name
                    )));
                }
            }
        }
        per_agent_service_masks.push(grid_services);
        explicit_action_labels.push(labels);
    }

    // Second pass: build models.
    let mut models = Vec::new();
    for (internal, id) in ids.iter().enumerate() {
        let raw = &doc.agent[&id.to_string()];
        let model = match (&raw.grid, &raw.states) {
            (Some(g), None) => {
                let start = raw
                    .start
                    .ok_or_else(|| schema(format!("agent {id}: grid agent needs `start`")))?;
                let mut spec = GridSpec::new(g.width, g.height, (start[0], start[1]));
                if start[0] >= g.width || start[1] >= g.height {
                    return Err(schema(format!("agent {id}: start outside the grid")));
                }
                for wtext in &g.walls {
                    spec.add_wall_segment(wtext).map_err(schema)?;
                }
                for (cells, mask, name) in &per_agent_service_masks[internal] {
                    for &(x, y) in cells {
                        if x >= g.width || y >= g.height {
                            return Err(schema(format!(
                                "agent {id}: service cell ({x},{y}) outside the grid"
                            )));
                        }
                    }
                    spec.services.push((cells.clone(), *mask, name.clone()));
                }
                build_grid_world(*id, &spec)?
            }
            (None, Some(states)) => {
                let init_name = raw
                    .init
                    .as_deref()
                    .ok_or_else(|| schema(format!("agent {id}: explicit agent needs `init`")))?;
                let init = states
                    .iter()
                    .position(|s| s == init_name)
                    .ok_or_else(|| ModelError::UnknownState {
                        agent: *id,
                        name: init_name.to_string(),
                    })? as u32;
                let mut ts = TransitionSystem::new(states.clone(), init);
                let labels = &explicit_action_labels[internal];
                let mut action_ids = BTreeMap::new();
                for (name, label) in labels {
                    action_ids.insert(name.clone(), ts.add_action(name.clone(), *label));
                }
                for t in raw.transitions.as_deref().unwrap_or(&[]) {
                    let a = *action_ids.get(&t.action).ok_or_else(|| {
                        schema(format!("agent {id}: undeclared action `{}`", t.action))
                    })?;
                    let from = ts.state_named(&t.from).ok_or_else(|| ModelError::UnknownState {
                        agent: *id,
                        name: t.from.clone(),
                    })?;
                    let to = ts.state_named(&t.to).ok_or_else(|| ModelError::UnknownState {
                        agent: *id,
                        name: t.to.clone(),
                    })?;
                    ts.add_transition(from, a, to)
                        .map_err(|_| ModelError::NonDeterminism {
                            agent: *id,
                            state: t.from.clone(),
                            action: t.action.clone(),
                        })?;
                }
                let services = services.owned_mask(internal);
                let model = AgentModel {
                    id: *id,
                    ts,
                    services,
                };
                model.validate()?;
                model
            }
            _ => {
                return Err(schema(format!(
                    "agent {id}: declare exactly one of `grid` or `states`"
                )))
            }
        };
        models.push(model);
    }

    // Tasks.
    let alphabet_cap = doc
        .config
        .alphabet_cap
        .unwrap_or(DEFAULT_ALPHABET_CAP)
        .min(MAX_PROPS);
    let all_names: BTreeSet<String> = (0..services.len() as u32)
        .map(|b| services.name(b).to_string())
        .collect();
    let mut tasks = Vec::new();
    for (internal, id) in ids.iter().enumerate() {
        let (formula, declared) = match doc.task.get(&id.to_string()) {
            Some(raw) => {
                let f = parse_ltl(&raw.formula, &all_names).map_err(|e| ScenarioError::Formula {
                    agent: *id,
                    err: e.to_string(),
                })?;
                (f, raw.depends.clone())
            }
            None => (Formula::True, None),
        };
        tasks.push(compile_task(
            &services,
            &models,
            internal,
            formula,
            declared.map(|ext| {
                ext.iter()
                    .map(|e| ids.iter().position(|i| i == e))
                    .collect::<Option<Vec<usize>>>()
            }),
            alphabet_cap,
            *id,
        )?);
    }
    for key in doc.task.keys() {
        let id: usize = key
            .parse()
            .map_err(|_| schema(format!("task key `{key}` is not a positive integer")))?;
        if !ids.contains(&id) {
            return Err(schema(format!("task {id} names an undeclared agent")));
        }
    }

    // Config.
    let default_duration = doc.duration.map(|d| (d.lo, d.hi)).unwrap_or((5, 10));
    let mut durations = Vec::new();
    for id in &ids {
        let raw = &doc.agent[&id.to_string()];
        let (lo, hi) = raw
            .duration
            .map(|d| (d.lo, d.hi))
            .unwrap_or(default_duration);
        if lo < 1 || hi < lo {
            return Err(schema(format!(
                "agent {id}: duration range [{lo},{hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        durations.push((lo, hi));
    }
    let (sugg_h, sugg_big_h) = crate::planner::suggest_horizons(&models);
    let config = SimConfig {
        spec_horizon: doc.config.h.unwrap_or(sugg_h).max(1),
        plan_horizon: doc.config.big_h.unwrap_or(sugg_big_h).max(1),
        alphabet_cap,
        seed: doc.config.seed.unwrap_or(0),
        mode: doc.config.mode.unwrap_or(SyncMode::Stepwise),
        param_sync: doc.config.param_sync.unwrap_or(false),
        stop: StopCriterion {
            visits: doc.config.stop_visits.unwrap_or(3),
            max_iters: doc.config.stop_max_iters.unwrap_or(10_000),
            max_time: doc.config.stop_max_time.unwrap_or(0),
        },
        report_first_k: doc.config.report_first_k.unwrap_or(7),
        durations,
    };

    Ok(Scenario {
        services,
        models,
        tasks,
        config,
    })
}

#[allow(clippy::too_many_arguments)]
fn compile_task(
    services: &ServiceTable,
    models: &[AgentModel],
    owner: usize,
    formula: Formula,
    declared: Option<Option<Vec<usize>>>,
    alphabet_cap: usize,
    external_id: usize,
) -> Result<TaskSpec, ScenarioError> {
    // Dependency set: owners of the formula's atoms, plus the owner.
    let mut atom_mask = 0u64;
    for atom in formula.atoms() {
        let bit = services.id(atom).ok_or_else(|| ScenarioError::Formula {
            agent: external_id,
            err: format!("unknown service `{atom}`"),
        })?;
        atom_mask |= 1 << bit;
    }
    let mut inferred: BTreeSet<usize> = owners_of_mask(services, atom_mask);
    inferred.insert(owner);
    let depends: Vec<usize> = match declared {
        Some(Some(decl)) => {
            let decl: BTreeSet<usize> = decl.into_iter().collect();
            if !inferred.is_subset(&decl) {
                return Err(ScenarioError::Formula {
                    agent: external_id,
                    err: "declared dependency set must cover the formula's services".into(),
                });
            }
            decl.into_iter().collect()
        }
        Some(None) => {
            return Err(ScenarioError::Formula {
                agent: external_id,
                err: "declared dependency names an undeclared agent".into(),
            })
        }
        None => inferred.into_iter().collect(),
    };

    let mut big_mask = 0u64;
    for &d in &depends {
        big_mask |= models[d].services;
    }
    let prop_bits: Vec<u32> = (0..services.len() as u32)
        .filter(|b| big_mask & (1 << b) != 0)
        .collect();
    let names: Vec<String> = prop_bits
        .iter()
        .map(|&b| services.name(b).to_string())
        .collect();
    let alphabet = Alphabet::with_global_bits(names, prop_bits, alphabet_cap).map_err(|e| {
        ScenarioError::Formula {
            agent: external_id,
            err: e,
        }
    })?;
    let automaton = ltl_to_buchi(&formula.to_nnf(), alphabet);
    Ok(TaskSpec {
        owner,
        depends,
        big_mask,
        formula,
        automaton,
    })
}

// ---------------------------------------------------------------------
// Serialization (explicit form)
// ---------------------------------------------------------------------

/// Serializes models, tasks and config into the document format using the
/// explicit transition-system form. Loading the output reproduces the
/// models exactly.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::from("version = 1\n\n[config]\n");
    let c = &s.config;
    writeln!(out, "h = {}", c.spec_horizon).unwrap();
    writeln!(out, "H = {}", c.plan_horizon).unwrap();
    writeln!(out, "alphabet_cap = {}", c.alphabet_cap).unwrap();
    writeln!(out, "seed = {}", c.seed).unwrap();
    writeln!(out, "mode = \"{}\"", c.mode).unwrap();
    writeln!(out, "param_sync = {}", c.param_sync).unwrap();
    writeln!(out, "stop_visits = {}", c.stop.visits).unwrap();
    writeln!(out, "stop_max_iters = {}", c.stop.max_iters).unwrap();
    writeln!(out, "stop_max_time = {}", c.stop.max_time).unwrap();
    writeln!(out, "report_first_k = {}", c.report_first_k).unwrap();

    for (internal, m) in s.models.iter().enumerate() {
        let id = m.id;
        writeln!(out, "\n[agent.{id}]").unwrap();
        let states: Vec<String> = (0..m.ts.n_states() as u32)
            .map(|q| format!("\"{}\"", m.ts.state_name(q)))
            .collect();
        writeln!(out, "states = [{}]", states.join(", ")).unwrap();
        writeln!(out, "init = \"{}\"", m.ts.state_name(m.ts.init())).unwrap();
        let (lo, hi) = c.durations[internal];
        writeln!(out, "duration = {{ lo = {lo}, hi = {hi} }}").unwrap();
        for a in m.ts.actions() {
            writeln!(out, "\n[[agent.{id}.actions]]").unwrap();
            writeln!(out, "name = \"{}\"", a.name).unwrap();
            match a.label {
                Label::Silent => writeln!(out, "silent = true").unwrap(),
                Label::Provide(mask) => {
                    let names: Vec<String> = s
                        .services
                        .mask_names(mask)
                        .iter()
                        .map(|n| format!("\"{n}\""))
                        .collect();
                    writeln!(out, "provide = [{}]", names.join(", ")).unwrap();
                }
            }
        }
        for q in 0..m.ts.n_states() as u32 {
            for &(a, t) in m.ts.outgoing(q) {
                writeln!(out, "\n[[agent.{id}.transitions]]").unwrap();
                writeln!(out, "action = \"{}\"", m.ts.action(a).name).unwrap();
                writeln!(out, "from = \"{}\"", m.ts.state_name(q)).unwrap();
                writeln!(out, "to = \"{}\"", m.ts.state_name(t)).unwrap();
            }
        }
    }

    for (internal, t) in s.tasks.iter().enumerate() {
        let id = s.models[internal].id;
        writeln!(out, "\n[task.{id}]").unwrap();
        writeln!(out, "formula = \"{}\"", t.formula).unwrap();
        let ext: Vec<String> = t
            .depends
            .iter()
            .map(|&d| s.models[d].id.to_string())
            .collect();
        writeln!(out, "depends = [{}]", ext.join(", ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MICRO: &str = r#"
version = 1

[config]
h = 2
H = 3
seed = 1

[duration]
lo = 1
hi = 1

[agent.1]
states = ["p", "q"]
init = "p"

[[agent.1.actions]]
name = "stay"
silent = true

[[agent.1.actions]]
name = "hop"
silent = true

[[agent.1.actions]]
name = "svc_a"
provide = ["a"]

[[agent.1.transitions]]
action = "stay"
from = "p"
to = "p"

[[agent.1.transitions]]
action = "stay"
from = "q"
to = "q"

[[agent.1.transitions]]
action = "hop"
from = "p"
to = "q"

[[agent.1.transitions]]
action = "hop"
from = "q"
to = "p"

[[agent.1.transitions]]
action = "svc_a"
from = "q"
to = "q"

[agent.2]
states = ["x"]
init = "x"

[[agent.2.actions]]
name = "stay"
silent = true

[[agent.2.actions]]
name = "svc_b"
provide = ["b"]

[[agent.2.transitions]]
action = "stay"
from = "x"
to = "x"

[[agent.2.transitions]]
action = "svc_b"
from = "x"
to = "x"

[task.1]
formula = "G F (a & b)"

[task.2]
formula = "G F b"
"#;

    #[test]
    fn loads_explicit_scenario_and_infers_dependencies() {
        let s = load_scenario_str(MICRO).unwrap();
        assert_eq!(s.models.len(), 2);
        assert_eq!(s.models[0].id, 1);
        // task 1 mentions b, owned by agent 2: D_1 = {1, 2}
        assert_eq!(s.tasks[0].depends, vec![0, 1]);
        assert_eq!(s.tasks[1].depends, vec![1]);
        assert!(s.tasks[0].automaton.is_deadlock_free());
        assert_eq!(s.config.spec_horizon, 2);
        assert_eq!(s.config.plan_horizon, 3);
        assert_eq!(s.config.durations, vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn degenerate_single_agent_scenario_loads() {
        // One state, a silent self-loop, and a formula demanding a service
        // no action provides: loading succeeds, planning fails later.
        let text = r#"
[agent.1]
states = ["x"]
init = "x"

[[agent.1.actions]]
name = "stay"
silent = true

[[agent.1.actions]]
name = "svc_a"
provide = ["a"]

[[agent.1.transitions]]
action = "stay"
from = "x"
to = "x"

[task.1]
formula = "G F a"
"#;
        let s = load_scenario_str(text).unwrap();
        assert_eq!(s.models.len(), 1);
        assert_eq!(s.tasks[0].depends, vec![0]);
    }

    #[test]
    fn alphabet_overlap_is_a_load_error() {
        let text = r#"
[agent.1]
states = ["x"]
init = "x"
[[agent.1.actions]]
name = "stay"
silent = true
[[agent.1.actions]]
name = "svc"
provide = ["a"]
[[agent.1.transitions]]
action = "stay"
from = "x"
to = "x"
[[agent.1.transitions]]
action = "svc"
from = "x"
to = "x"

[agent.2]
states = ["y"]
init = "y"
[[agent.2.actions]]
name = "stay"
silent = true
[[agent.2.actions]]
name = "svc"
provide = ["a"]
[[agent.2.transitions]]
action = "stay"
from = "y"
to = "y"
[[agent.2.transitions]]
action = "svc"
from = "y"
to = "y"
"#;
        let err = load_scenario_str(text).unwrap_err();
        assert!(err.to_string().contains("alphabet overlap"), "{err}");
    }

    #[test]
    fn declared_dependencies_must_cover_inferred() {
        let text = MICRO.replace("formula = \"G F (a & b)\"", "formula = \"G F (a & b)\"\ndepends = [1]");
        let err = load_scenario_str(&text).unwrap_err();
        assert!(err.to_string().contains("dependency"), "{err}");
    }

    #[test]
    fn roundtrip_reproduces_models_exactly() {
        let s = load_scenario_str(MICRO).unwrap();
        let text = serialize_scenario(&s);
        let again = load_scenario_str(&text).unwrap();
        assert_eq!(s.models, again.models);
        assert_eq!(s.config, again.config);
        for (a, b) in s.tasks.iter().zip(&again.tasks) {
            assert_eq!(a.formula, b.formula);
            assert_eq!(a.depends, b.depends);
            assert_eq!(a.big_mask, b.big_mask);
        }
        // serialization is a fixpoint
        assert_eq!(text, serialize_scenario(&again));
    }

    #[test]
    fn grid_agent_with_rect_services() {
        let text = r#"
[agent.3]
start = [0, 0]
[agent.3.grid]
width = 2
height = 2
[[agent.3.services]]
rect = [0, 0, 1, 1]
provide = ["snap"]

[task.3]
formula = "G F snap"
"#;
        let s = load_scenario_str(text).unwrap();
        let m = &s.models[0];
        let a = m.ts.action_named("svc_snap").unwrap();
        assert_eq!(m.ts.states_with_action(a).len(), 4);
    }
}
