use crate::macro_action::MacroId;
use crate::obs::MacroObservation;

/// Execution-side bookkeeping for one agent's running macro-action.
#[derive(Debug, Clone)]
pub struct AgentMacroState {
    /// `None` only before the first selection of an episode.
    pub active_macro: Option<MacroId>,
    /// Primitive ticks executed since the macro was selected; 0 exactly when
    /// selected this tick and not yet executed.
    pub steps_elapsed: u32,
    /// Macro-observation captured when the macro was selected.
    pub last_selection_obs: MacroObservation,
}

impl AgentMacroState {
    pub fn empty(obs_dim: usize) -> Self {
        Self {
            active_macro: None,
            steps_elapsed: 0,
            last_selection_obs: MacroObservation::zeros(obs_dim),
        }
    }
}

/// Joint execution state across agents.
#[derive(Debug, Clone)]
pub struct JointMacroState {
    pub per_agent: Vec<AgentMacroState>,
    /// Tick index at which the current joint macro-action began.
    pub joint_start_tick: u64,
    /// `undone_mask[i]` is true iff agent i's macro-action did NOT terminate
    /// at the most recent tick.
    pub undone_mask: Vec<bool>,
}

impl JointMacroState {
    pub fn new(obs_dims: &[usize]) -> Self {
        Self {
            per_agent: obs_dims
                .iter()
                .map(|&d| AgentMacroState::empty(d))
                .collect(),
            joint_start_tick: 0,
            undone_mask: vec![false; obs_dims.len()],
        }
    }

    pub fn num_agents(&self) -> usize {
        self.per_agent.len()
    }

    /// Agents that must pick a new macro-action: terminated last tick, or
    /// never selected one.
    pub fn needs_selection(&self, agent: usize) -> bool {
        self.per_agent[agent].active_macro.is_none() || !self.undone_mask[agent]
    }

    /// Current joint macro ids; panics if some agent has none active.
    pub fn active_macros(&self) -> Vec<MacroId> {
        self.per_agent
            .iter()
            .map(|a| a.active_macro.expect("agent without active macro"))
            .collect()
    }
}
