//! Plan synthesis and execution for teams of agents with individual
//! linear-temporal-logic tasks over *services* (events of interest attached
//! to actions), coordinated through explicit synchronization requests.
//!
//! The crate provides:
//!
//! - an LTL front end translating formulas into deadlock-free Büchi automata
//!   over explicit service-set alphabets ([`ltl`], [`buchi`]);
//! - agent models: transition systems with silent/non-silent action labels,
//!   grid-world construction and scenario loading ([`agent`], [`grid`],
//!   [`scenario`]);
//! - the receding-horizon planner: dynamic dependency partitioning,
//!   horizon-bounded intersection automata and product systems, progressive
//!   values, horizon extension and backtracking ([`dependency`],
//!   [`intersection`], [`product`], [`planner`]);
//! - a deterministic, seeded discrete-event simulator with stepwise and
//!   event-triggered synchronization, behavior recording, compatibility
//!   checking and local-satisfaction monitoring ([`sim`]);
//! - a centralized baseline synthesizer used as a feasibility oracle at
//!   small scale ([`oracle`]).

pub mod agent;
pub mod buchi;
pub mod dependency;
pub mod grid;
pub mod intersection;
pub mod ltl;
pub mod oracle;
pub mod planner;
pub mod product;
pub mod scenario;
pub mod sim;
pub mod sym;

pub use agent::{AgentModel, Label, TaskSpec, TransitionSystem};
pub use buchi::BuchiAutomaton;
pub use intersection::{IntersectionAutomaton, Progress};
pub use ltl::Formula;
pub use planner::Planner;
pub use product::{PlanFragment, ProductSystem};
pub use scenario::{Scenario, SimConfig, SyncMode};
pub use sim::{run_event_triggered, run_stepwise, Behavior, RunOutput};
pub use sym::ServiceTable;
