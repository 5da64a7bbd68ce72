//! Dependency analysis: the participating-services test, horizon
//! alphabets, and the offline/dynamic dependency partitions.

use crate::agent::TaskSpec;
use crate::buchi::BuchiAutomaton;
use std::collections::{BTreeSet, HashMap};

/// Agent classes forming a disjoint cover; members are ordered by the
/// current priority ordering, classes by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyPartition {
    pub classes: Vec<Vec<usize>>,
}

impl DependencyPartition {
    pub fn class_of(&self, agent: usize) -> &[usize] {
        self.classes
            .iter()
            .find(|c| c.contains(&agent))
            .expect("partition covers all agents")
    }

    /// True when every class of `self` is contained in a class of `other`.
    pub fn refines(&self, other: &DependencyPartition) -> bool {
        self.classes.iter().all(|c| {
            let host = other.class_of(c[0]);
            c.iter().all(|m| host.contains(m))
        })
    }
}

/// Decides whether an alien service alphabet (a local symbol mask of
/// `b`'s alphabet) is participating in state `q`: some transition's
/// membership changes under some rewrite of its alien bits.
pub fn participating(b: &BuchiAutomaton, q: u32, alien: u32) -> bool {
    if alien == 0 {
        return false;
    }
    let full_fiber = 1u64 << alien.count_ones();

    // Per explicit edge: group its symbols by their non-alien part. The
    // edge is insensitive to the alien services iff every group covers all
    // 2^|alien| rewrites. The implicit sink edge needs no separate check:
    // its symbol set is the complement of the union of the real edges, so
    // a partially covered group there forces a partially covered group on
    // whichever real edge contributed to it.
    for (_, set) in b.edges_of(q) {
        let mut fibers: HashMap<u32, u64> = HashMap::new();
        for sym in set.iter() {
            *fibers.entry(sym & !alien).or_insert(0) += 1;
        }
        if fibers.values().any(|&c| c < full_fiber) {
            return true;
        }
    }
    false
}

/// Agents (internal indices) whose alphabets participate within the
/// horizon: participation is evaluated on the source states of all
/// transitions on paths of at most `h` steps from `q`, i.e. on states at
/// depth `<= max(h-1, 0)`.
pub fn horizon_alphabet(
    spec: &TaskSpec,
    models: &[crate::agent::AgentModel],
    q: u32,
    h: usize,
) -> BTreeSet<usize> {
    let depth = h.saturating_sub(1);
    let mut states: BTreeSet<u32> = BTreeSet::new();
    for j in 0..=depth {
        states.extend(spec.automaton.reachable_k(q, j));
    }
    let mut out = BTreeSet::from([spec.owner]);
    for &agent in &spec.depends {
        if agent == spec.owner || out.contains(&agent) {
            continue;
        }
        let alien = spec.local_symbol(models[agent].services);
        if states.iter().any(|&s| participating(&spec.automaton, s, alien)) {
            out.insert(agent);
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    // Keep the smaller root so class representatives are reproducible.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn classes(&mut self, n: usize, priority: &[usize]) -> DependencyPartition {
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        // Members in priority order within each class.
        for &agent in priority {
            groups.entry(self.find(agent)).or_default().push(agent);
        }
        debug_assert_eq!(priority.len(), n);
        let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
        classes.sort_by_key(|c| *c.iter().min().expect("nonempty class"));
        DependencyPartition { classes }
    }
}

/// Partition induced by coupling through participating alphabets within
/// the horizon of the current specification states.
pub fn dynamic_partition(
    specs: &[TaskSpec],
    models: &[crate::agent::AgentModel],
    current: &[u32],
    h: usize,
    priority: &[usize],
) -> DependencyPartition {
    dynamic_partition_with(specs, models, current, h, priority, &[])
}

/// Like [`dynamic_partition`], with additional coupling pairs forced into
/// one class (used when horizon extension reveals deeper participation).
pub fn dynamic_partition_with(
    specs: &[TaskSpec],
    models: &[crate::agent::AgentModel],
    current: &[u32],
    h: usize,
    priority: &[usize],
    extra: &[(usize, usize)],
) -> DependencyPartition {
    let n = specs.len();
    let mut uf = UnionFind::new(n);
    for (j, spec) in specs.iter().enumerate() {
        let gens = horizon_alphabet(spec, models, current[j], h);
        for agent in gens {
            uf.union(j, agent);
        }
    }
    for &(a, b) in extra {
        uf.union(a, b);
    }
    uf.classes(n, priority)
}

/// Offline partition: the closure of "members of a dependency set share a
/// class".
pub fn offline_partition(specs: &[TaskSpec], priority: &[usize]) -> DependencyPartition {
    let n = specs.len();
    let mut uf = UnionFind::new(n);
    for (i, spec) in specs.iter().enumerate() {
        for &d in &spec.depends {
            uf.union(i, d);
        }
    }
    uf.classes(n, priority)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::fixtures::spec_over_abc;
    use crate::sym::submasks as subs;

    // Local masks in the fixture alphabet {a, b, c}.
    const A: u32 = 0b001;
    const B: u32 = 0b010;
    const C: u32 = 0b100;

    /// Direct enumeration of the defining condition, used as an oracle for
    /// the fiber-based implementation.
    fn participating_naive(b: &BuchiAutomaton, q: u32, alien: u32) -> bool {
        let n = b.alphabet().len();
        for sym in 0..(1u32 << n) {
            for dst in 0..b.n_states() as u32 {
                if !b.has_edge(q, sym, dst) {
                    continue;
                }
                for varsigma in subs(alien as u64) {
                    let rewritten = (sym & !alien) | varsigma as u32;
                    if !b.has_edge(q, rewritten, dst) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn participating_on_worked_example() {
        let b = spec_over_abc();
        let (q1, q2, q4) = (0, 1, 3);
        // b is required on q1 -> q2; c is neither required nor forbidden.
        assert!(participating(&b, q1, B));
        assert!(!participating(&b, q1, C));
        // c is forbidden on q2 -> q3 and required on q2 -> q4.
        assert!(participating(&b, q2, C));
        // the q4 loops cover all rewrites of b and c.
        assert!(!participating(&b, q4, B));
        assert!(!participating(&b, q4, C));
    }

    #[test]
    fn participating_matches_naive_enumeration() {
        let b = spec_over_abc();
        let completed = b.clone().complete_deadlock_free();
        for aut in [&b, &completed] {
            for q in 0..aut.n_states() as u32 {
                for alien in [A, B, C, B | C] {
                    assert_eq!(
                        participating(aut, q, alien),
                        participating_naive(aut, q, alien),
                        "state {q} alien {alien:b}"
                    );
                }
            }
        }
    }

    #[test]
    fn horizon_alphabet_grows_with_horizon() {
        // Packaged as a task over three single-service agents.
        let b = spec_over_abc();
        let spec = TaskSpec {
            owner: 0,
            depends: vec![0, 1, 2],
            big_mask: 0b111,
            formula: crate::ltl::Formula::True,
            automaton: b,
        };
        let models: Vec<crate::agent::AgentModel> = (0..3)
            .map(|i| {
                let mut ts = crate::agent::TransitionSystem::new(vec!["x".into()], 0);
                let stay = ts.add_action("stay", crate::agent::Label::Silent);
                ts.add_transition(0, stay, 0).unwrap();
                crate::agent::AgentModel {
                    id: i + 1,
                    ts,
                    services: 1 << i,
                }
            })
            .collect();
        let gens = |h: usize| horizon_alphabet(&spec, &models, 0, h);
        assert_eq!(gens(0), BTreeSet::from([0, 1]));
        assert_eq!(gens(1), BTreeSet::from([0, 1]));
        assert_eq!(gens(2), BTreeSet::from([0, 1, 2]));
    }

}
