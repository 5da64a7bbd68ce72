//! Worked two-agent example: the word each agent observes at its own
//! non-silent instants, and the resulting prefix verdicts.

use lomap_core::agent::Label;
use lomap_core::scenario::load_scenario_str;
use lomap_core::sim::{monitor_local_satisfaction, Behavior, SyncRequest, Verdict};

const PAIR: &str = r#"
[config]
h = 2
H = 2

[agent.1]
states = ["x"]
init = "x"
[[agent.1.actions]]
name = "stay"
silent = true
[[agent.1.actions]]
name = "svc_a"
provide = ["a"]
[[agent.1.actions]]
name = "svc_none"
provide = []
[[agent.1.transitions]]
action = "stay"
from = "x"
to = "x"
[[agent.1.transitions]]
action = "svc_a"
from = "x"
to = "x"
[[agent.1.transitions]]
action = "svc_none"
from = "x"
to = "x"

[agent.2]
states = ["y"]
init = "y"
[[agent.2.actions]]
name = "stay"
silent = true
[[agent.2.actions]]
name = "svc_b"
provide = ["b"]
[[agent.2.actions]]
name = "svc_none"
provide = []
[[agent.2.transitions]]
action = "stay"
from = "y"
to = "y"
[[agent.2.transitions]]
action = "svc_b"
from = "y"
to = "y"
[[agent.2.transitions]]
action = "svc_none"
from = "y"
to = "y"

[task.1]
formula = "a & X (a & b)"

[task.2]
formula = "b & X (b & a)"
"#;

/// Unit-duration behavior with all-nosync requests: position j sends at
/// t=j and starts at t=j.
fn behavior(agent: usize, labels: Vec<Label>) -> Behavior {
    let n = labels.len();
    Behavior {
        agent,
        states: vec![0; n + 1],
        actions: vec![0; n],
        requests: vec![SyncRequest::NoSync; n],
        t_sync: (0..n as u64).collect(),
        t_action: (0..n as u64).collect(),
        labels,
    }
}

#[test]
fn observed_words_and_verdicts_match_the_example() {
    let sc = load_scenario_str(PAIR).unwrap();
    let a = 1u64 << sc.services.id("a").unwrap();
    let b = 1u64 << sc.services.id("b").unwrap();

    use Label::{Provide, Silent};
    let b1 = behavior(
        1,
        vec![
            Provide(a),
            Silent,
            Silent,
            Silent,
            Provide(a),
            Provide(0),
            Silent,
            Silent,
        ],
    );
    let b2 = behavior(
        2,
        vec![
            Silent,
            Provide(b),
            Provide(b),
            Silent,
            Provide(b),
            Provide(0),
            Silent,
            Silent,
        ],
    );
    for beh in [&b1, &b2] {
        beh.well_formed().unwrap();
    }
    let behaviors = vec![b1, b2];

    // Agent 1 samples at its own non-silent instants 0, 4, 5 and sees
    // {a}, {a,b}, {}: the formula is satisfied whatever follows.
    let r1 = monitor_local_satisfaction(&behaviors, 0, &sc.tasks[0], None, None);
    assert_eq!(r1.times, vec![0, 4, 5]);
    assert_eq!(r1.word, vec![a, a | b, 0]);
    assert_eq!(r1.verdict, Verdict::Satisfied);

    // Agent 2 samples at 1, 2, 4, 5 and sees {b}, {b}, {a,b}, {}: the
    // second position lacks a, so the formula is violated for good.
    let r2 = monitor_local_satisfaction(&behaviors, 1, &sc.tasks[1], None, None);
    assert_eq!(r2.times, vec![1, 2, 4, 5]);
    assert_eq!(r2.word, vec![b, b, a | b, 0]);
    assert_eq!(r2.verdict, Verdict::Violated);
}

#[test]
fn lone_agent_observes_its_own_word() {
    let sc = load_scenario_str(PAIR).unwrap();
    // restrict the task to the agent's own services: reload with a local
    // formula so the dependency set is a singleton
    let local = PAIR.replace("a & X (a & b)", "F a");
    let sc2 = load_scenario_str(&local).unwrap();
    assert_eq!(sc2.tasks[0].depends, vec![0]);
    let a = 1u64 << sc.services.id("a").unwrap();
    let b1 = behavior(1, vec![Label::Provide(a), Label::Silent]);
    let b2 = behavior(2, vec![Label::Provide(2), Label::Silent]);
    let r = monitor_local_satisfaction(&[b1, b2], 0, &sc2.tasks[0], None, None);
    assert_eq!(r.word, vec![a]);
    assert_eq!(r.verdict, Verdict::Satisfied);
}

#[test]
fn empty_word_is_pending() {
    let sc = load_scenario_str(PAIR).unwrap();
    let b1 = behavior(1, vec![Label::Silent, Label::Silent]);
    let b2 = behavior(2, vec![Label::Silent]);
    let r = monitor_local_satisfaction(&[b1, b2], 0, &sc.tasks[0], None, None);
    assert!(r.times.is_empty());
    assert_eq!(r.verdict, Verdict::Pending);
}

#[test]
fn observation_horizon_truncates_the_word() {
    let sc = load_scenario_str(PAIR).unwrap();
    let a = 1u64 << sc.services.id("a").unwrap();
    let b1 = behavior(
        1,
        vec![Label::Provide(a), Label::Silent, Label::Provide(a)],
    );
    let b2 = behavior(2, vec![Label::Silent, Label::Silent, Label::Silent]);
    let r = monitor_local_satisfaction(&[b1, b2], 0, &sc.tasks[0], None, Some(1));
    assert_eq!(r.times, vec![0]);
}
