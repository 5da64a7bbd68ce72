//! Structural properties of the horizon constructions: projections of
//! intersection paths replay through the member automata, member runs
//! lift back into the intersection, and the dynamic partition refines the
//! offline one monotonically in the horizon.

use lomap_core::dependency::{dynamic_partition, offline_partition};
use lomap_core::intersection::build_intersection;
use lomap_core::scenario::{load_scenario_str, Scenario};
use lomap_core::sym::submasks;

const COUPLED: &str = r#"
[config]
h = 3
H = 4

[agent.1]
start = [0, 0]
[agent.1.grid]
width = 3
height = 1
[[agent.1.services]]
at = [2, 0]
provide = ["load"]

[agent.2]
start = [0, 0]
[agent.2.grid]
width = 2
height = 1
[[agent.2.services]]
at = [1, 0]
provide = ["help"]

[agent.3]
start = [0, 0]
[agent.3.grid]
width = 2
height = 1
[[agent.3.services]]
at = [0, 0]
provide = ["snap"]

[task.1]
formula = "G F (load & help)"

[task.2]
formula = "G F help"

[task.3]
formula = "G F snap"
"#;

fn scenario() -> Scenario {
    load_scenario_str(COUPLED).unwrap()
}

/// Enumerate labeled paths of the intersection up to a depth by
/// resolving joint symbols on demand, and check that each member's
/// projected state sequence replays through its automaton: silent steps
/// freeze the component, non-silent steps follow a transition on the
/// joint services restricted to the member's alphabet.
#[test]
fn intersection_paths_project_onto_member_runs() {
    let sc = scenario();
    let members = [0usize, 1];
    let current: Vec<u32> = sc.tasks.iter().map(|t| t.automaton.init()).collect();
    let a = build_intersection(&sc.tasks, &sc.models, &members, &current, 3);

    let class_masks: Vec<u64> = members.iter().map(|&m| sc.models[m].services).collect();
    // trail: (silent mask, union, reached state), starting at the init
    let mut stack: Vec<Vec<(u32, u64, u32)>> = vec![Vec::new()];
    let mut paths = 0usize;
    let mut buf = Vec::new();
    while let Some(trail) = stack.pop() {
        let here = trail.last().map_or(a.init(), |&(_, _, s)| s);

        // check the projection property for this path
        for (m, &agent) in members.iter().enumerate() {
            let spec = &sc.tasks[agent];
            let mut q = a.state_vector(a.init())[m];
            for &(silent_mask, union, state) in &trail {
                let target = a.state_vector(state)[m];
                if silent_mask & (1 << m) != 0 {
                    assert_eq!(target, q, "silent step moved member {m}");
                } else {
                    let sym = spec.local_symbol(union);
                    assert!(
                        spec.automaton.has_edge(q, sym, target),
                        "member {m}: no transition under {union:b}"
                    );
                }
                q = target;
            }
        }
        paths += 1;

        if trail.len() >= 3 {
            continue;
        }
        for silent_mask in 0u32..(1 << members.len()) {
            let mut free = 0u64;
            for (m, &mask) in class_masks.iter().enumerate() {
                if silent_mask & (1 << m) == 0 {
                    free |= mask;
                }
            }
            for union in submasks(free) {
                let silent: Vec<bool> = (0..members.len())
                    .map(|m| silent_mask & (1 << m) != 0)
                    .collect();
                a.successors_on(&sc.tasks, here, &silent, union, &mut buf);
                for &t in &buf {
                    let mut trail2 = trail.clone();
                    trail2.push((silent_mask, union, t));
                    stack.push(trail2);
                }
            }
        }
    }
    assert!(paths > 50, "explored {paths} paths");
}

/// Any run of one member's automaton over class-producible symbols lifts
/// into the intersection with the other members padded silently (or
/// cooperating when the word uses their services).
#[test]
fn member_runs_lift_into_the_intersection() {
    let sc = scenario();
    let members = [0usize, 1];
    let current: Vec<u32> = sc.tasks.iter().map(|t| t.automaton.init()).collect();
    let h = 3;
    let a = build_intersection(&sc.tasks, &sc.models, &members, &current, h);
    let spec = &sc.tasks[0];
    let class_services = sc.models[0].services | sc.models[1].services;

    // enumerate all runs of member 0 of length <= h over class-producible
    // symbols, then check each lifts
    let mut runs = vec![(spec.automaton.init(), Vec::<u64>::new())];
    let mut all = Vec::new();
    while let Some((q, word)) = runs.pop() {
        if word.len() < h {
            for union in submasks(class_services) {
                let sym = spec.local_symbol(union);
                let mut next = Vec::new();
                spec.automaton.for_each_successor(q, sym, |t| next.push(t));
                for t in next {
                    let mut w2 = word.clone();
                    w2.push(union);
                    all.push((w2.clone(), t));
                    runs.push((t, w2));
                }
            }
        }
    }
    assert!(all.len() > 20);
    let mut buf = Vec::new();
    for (word, expect_q) in all {
        // lift: member 0 non-silent each step; member 1 non-silent iff the
        // union touches its services
        let mut frontier = vec![a.init()];
        for &union in &word {
            let silent1 = union & sc.models[1].services == 0;
            let mut next = Vec::new();
            for &s in &frontier {
                a.successors_on(&sc.tasks, s, &[false, silent1], union, &mut buf);
                for &t in &buf {
                    if !next.contains(&t) {
                        next.push(t);
                    }
                }
            }
            frontier = next;
            assert!(!frontier.is_empty(), "lift died on word {word:?}");
        }
        assert!(
            frontier.iter().any(|&s| a.state_vector(s)[0] == expect_q),
            "no lifted path tracks the run for word {word:?}"
        );
    }
}

#[test]
fn dynamic_partition_refines_offline_and_merges_monotonically() {
    let sc = scenario();
    let priority: Vec<usize> = (0..sc.models.len()).collect();
    let offline = offline_partition(&sc.tasks, &priority);
    // load depends on help: agents 1 and 2 share the offline class
    assert_eq!(offline.classes, vec![vec![0, 1], vec![2]]);

    let current: Vec<u32> = sc.tasks.iter().map(|t| t.automaton.init()).collect();
    let mut previous: Option<lomap_core::dependency::DependencyPartition> = None;
    for h in 0..5 {
        let dynamic = dynamic_partition(&sc.tasks, &sc.models, &current, h, &priority);
        assert!(
            dynamic.refines(&offline),
            "h={h}: {:?} does not refine {:?}",
            dynamic.classes,
            offline.classes
        );
        if let Some(prev) = &previous {
            assert!(
                prev.refines(&dynamic),
                "partition coarsened non-monotonically at h={h}"
            );
        }
        previous = Some(dynamic);
    }
}

#[test]
fn purely_local_tasks_stay_singletons() {
    let local = COUPLED.replace("G F (load & help)", "G F load");
    let sc = load_scenario_str(&local).unwrap();
    let priority: Vec<usize> = (0..sc.models.len()).collect();
    let current: Vec<u32> = sc.tasks.iter().map(|t| t.automaton.init()).collect();
    let dynamic = dynamic_partition(&sc.tasks, &sc.models, &current, 3, &priority);
    assert_eq!(dynamic.classes, vec![vec![0], vec![1], vec![2]]);
}
