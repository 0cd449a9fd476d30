use macrl_core::{MacroId, MacroObservation};

/// One primitive tick of one agent's row. While the macro-action is still
/// running, `z_next` equals `z`; at termination it carries the fresh
/// macro-observation and `r_partial` has frozen into the macro's accumulated
/// reward.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStepRecord {
    pub z: MacroObservation,
    pub m: MacroId,
    pub z_next: MacroObservation,
    /// Running discounted sum `Σ_{j<tau_so_far} γ^j r_{t_m+j}`.
    pub r_partial: f64,
    pub terminated: bool,
    pub tau_so_far: u32,
}

/// One primitive tick of the joint row. The segment's accumulator starts at
/// the tick the current joint macro-action began and resets whenever any
/// agent terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct JointStepRecord {
    pub z: Vec<MacroObservation>,
    pub m: Vec<MacroId>,
    pub z_next: Vec<MacroObservation>,
    pub r_partial: f64,
    pub any_terminated: bool,
    /// True per agent whose macro-action did not terminate at this tick.
    pub undone_mask: Vec<bool>,
    pub tau_so_far: u32,
}
