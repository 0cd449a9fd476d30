use macrl_core::{MacroId, MacroObservation};

use crate::error::ReplayError;
use crate::record::{AgentStepRecord, JointStepRecord};

/// One macro-level transition extracted from a raw tick row.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSqueezedEntry {
    pub z: MacroObservation,
    pub m: MacroId,
    pub z_next: MacroObservation,
    /// Accumulated discounted reward r^c over the macro's ticks.
    pub reward: f64,
    /// Number of primitive ticks the macro ran.
    pub tau: u32,
    /// True only on the final transition of an episode.
    pub done: bool,
}

/// One joint macro-level transition; `undone_mask` names the agents whose
/// macro-actions continue past this boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSqueezedEntry {
    pub z: Vec<MacroObservation>,
    pub m: Vec<MacroId>,
    pub z_next: Vec<MacroObservation>,
    pub reward: f64,
    pub tau: u32,
    pub done: bool,
    pub undone_mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedTrace<T> {
    pub entries: Vec<T>,
}

impl<T> SqueezedTrace<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Keep exactly the records where the agent's macro-action terminated, each
/// carrying its frozen reward and duration. `ends_episode` marks whether the
/// row's last tick is the episode's final tick, in which case the last kept
/// entry is flagged terminal.
pub fn squeeze_agent_trace(
    row: &[AgentStepRecord],
    ends_episode: bool,
) -> Result<SqueezedTrace<AgentSqueezedEntry>, ReplayError> {
    if row.is_empty() {
        return Err(ReplayError::EmptyTrace);
    }
    let mut entries: Vec<AgentSqueezedEntry> = row
        .iter()
        .filter(|r| r.terminated)
        .map(|r| AgentSqueezedEntry {
            z: r.z.clone(),
            m: r.m,
            z_next: r.z_next.clone(),
            reward: r.r_partial,
            tau: r.tau_so_far,
            done: false,
        })
        .collect();
    if ends_episode {
        // the final tick always terminates, so the last kept entry is the
        // episode's closing transition
        if let Some(last) = entries.last_mut() {
            last.done = true;
        }
    }
    Ok(SqueezedTrace { entries })
}

/// Joint analogue: keep records where any agent terminated.
pub fn squeeze_joint_trace(
    row: &[JointStepRecord],
    ends_episode: bool,
) -> Result<SqueezedTrace<JointSqueezedEntry>, ReplayError> {
    if row.is_empty() {
        return Err(ReplayError::EmptyTrace);
    }
    let mut entries: Vec<JointSqueezedEntry> = row
        .iter()
        .filter(|r| r.any_terminated)
        .map(|r| JointSqueezedEntry {
            z: r.z.clone(),
            m: r.m.clone(),
            z_next: r.z_next.clone(),
            reward: r.r_partial,
            tau: r.tau_so_far,
            done: false,
            undone_mask: r.undone_mask.clone(),
        })
        .collect();
    if ends_episode {
        if let Some(last) = entries.last_mut() {
            last.done = true;
        }
    }
    Ok(SqueezedTrace { entries })
}
