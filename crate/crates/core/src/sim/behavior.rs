//! Recorded agent behaviors and the compatibility check over their
//! synchronization requests and timing.

use crate::agent::Label;

/// Synchronization request sent at a state before executing the next
/// action. A scoped request waits only for the named internal agent
/// indices (used by parametrized synchronization); an unscoped one waits
/// for the whole team.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncRequest {
    Sync { scope: Option<Vec<usize>> },
    NoSync,
}

impl SyncRequest {
    pub fn is_sync(&self) -> bool {
        matches!(self, SyncRequest::Sync { .. })
    }

    pub fn covers(&self, agent: usize) -> bool {
        match self {
            SyncRequest::Sync { scope: None } => true,
            SyncRequest::Sync { scope: Some(s) } => s.contains(&agent),
            SyncRequest::NoSync => false,
        }
    }
}

/// Behavior of one agent: its trace, synchronization sequence, and
/// behavior time sequence. Position `j` (0-based here) reads: in state
/// `states[j]`, the agent sent `requests[j]` at `t_sync[j]` and started
/// `actions[j]` at `t_action[j]`; `states[j+1]` follows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Behavior {
    /// External agent id.
    pub agent: usize,
    pub states: Vec<u32>,
    pub actions: Vec<u32>,
    pub labels: Vec<Label>,
    pub requests: Vec<SyncRequest>,
    pub t_sync: Vec<u64>,
    pub t_action: Vec<u64>,
}

impl Behavior {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Checks the internal timing shape: alternating times non-decreasing
    /// and the sync wait zero on every nosync position.
    pub fn well_formed(&self) -> Result<(), String> {
        let n = self.len();
        if self.states.len() != n + 1
            || self.labels.len() != n
            || self.requests.len() != n
            || self.t_sync.len() != n
            || self.t_action.len() != n
        {
            return Err("behavior arrays disagree in length".into());
        }
        let mut prev = 0u64;
        for j in 0..n {
            if self.t_sync[j] < prev || self.t_action[j] < self.t_sync[j] {
                return Err(format!("behavior time sequence decreases at {j}"));
            }
            if self.requests[j] == SyncRequest::NoSync && self.t_action[j] != self.t_sync[j] {
                return Err(format!("nonzero sync wait on a nosync position at {j}"));
            }
            prev = self.t_action[j];
        }
        Ok(())
    }

    /// Position whose action started exactly at `t`, if any. Action start
    /// times are strictly increasing, so the position is unique.
    pub fn position_at(&self, t: u64) -> Option<usize> {
        self.t_action.binary_search(&t).ok()
    }

    /// Service set provided at time `t` (silent if no non-silent action of
    /// this behavior starts at `t`).
    pub fn provided_at(&self, t: u64) -> Label {
        match self.position_at(t) {
            Some(j) => self.labels[j],
            None => Label::Silent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityViolation {
    /// Internal index of the requesting agent, its position, and what
    /// went wrong.
    pub agent: usize,
    pub position: usize,
    pub reason: String,
}

/// Verifies that every sync request pairs up across its scope: for each
/// sync of agent `i` at position `j`, every covered agent has a matching
/// sync with the same action start time, and at least one participant of
/// that instant waited zero time.
pub fn check_compatibility(behaviors: &[Behavior]) -> Result<(), CompatibilityViolation> {
    for (i, b) in behaviors.iter().enumerate() {
        for j in 0..b.len() {
            let req = &b.requests[j];
            if !req.is_sync() {
                continue;
            }
            let t = b.t_action[j];
            let mut zero_wait = b.t_sync[j] == t;
            for (i2, b2) in behaviors.iter().enumerate() {
                if i2 == i || !req.covers(i2) {
                    continue;
                }
                match b2.position_at(t) {
                    Some(j2) if b2.requests[j2].is_sync() => {
                        zero_wait |= b2.t_sync[j2] == t;
                    }
                    Some(_) => {
                        return Err(CompatibilityViolation {
                            agent: i,
                            position: j,
                            reason: format!(
                                "agent {i2} starts at t={t} without a sync request"
                            ),
                        })
                    }
                    None => {
                        return Err(CompatibilityViolation {
                            agent: i,
                            position: j,
                            reason: format!("agent {i2} has no matching index at t={t}"),
                        })
                    }
                }
            }
            if !zero_wait {
                return Err(CompatibilityViolation {
                    agent: i,
                    position: j,
                    reason: format!("no zero-wait participant at t={t}"),
                });
            }
        }
    }
    Ok(())
}

/// In stepwise execution all agents' j-th action start times coincide.
pub fn check_stepwise_alignment(behaviors: &[Behavior]) -> Result<(), CompatibilityViolation> {
    let Some(first) = behaviors.first() else {
        return Ok(());
    };
    for (i, b) in behaviors.iter().enumerate().skip(1) {
        let n = b.len().min(first.len());
        for j in 0..n {
            if b.t_action[j] != first.t_action[j] {
                return Err(CompatibilityViolation {
                    agent: i,
                    position: j,
                    reason: format!(
                        "start {} differs from agent 0's {}",
                        b.t_action[j], first.t_action[j]
                    ),
                });
            }
        }
    }
    Ok(())
}
