//! Domain-agnostic abstractions for cooperative multi-agent decision processes
//! with temporally extended (macro) actions, plus the primitive-tick execution
//! loop that runs per-agent macro controllers asynchronously.

mod error;
mod joint;
mod macro_action;
mod obs;
mod runner;
mod state;
pub mod wire;

pub use error::CoreError;
pub use joint::JointActionSpace;
pub use macro_action::{MacroActionSpec, MacroId};
pub use obs::MacroObservation;
pub use runner::{
    run_primitive_tick, select_macros_centralized, select_macros_decentralized, EpisodeRunner,
    FnSelector, JointMacroSelector, MacroSelector, TickOutcome,
};
pub use state::{AgentMacroState, JointMacroState};

/// Simulator interface: the environment owns its state, its agents' macro-action
/// sets, and the per-agent primitive-level views that controllers and
/// terminators read. All randomness comes from the caller's stream, so a fixed
/// seed fixes the trajectory.
pub trait EnvModel {
    /// Per-agent primitive-level view (observation history plus whatever the
    /// low-level controllers need). Environments keep one per agent and update
    /// it on every tick.
    type View;

    fn num_agents(&self) -> usize;
    /// Macro-action set M_i for one agent; ids are contiguous from 0.
    fn macro_specs(&self, agent: usize) -> &[MacroActionSpec<Self::View>];
    /// Number of primitive actions available to one agent.
    fn primitive_action_count(&self, agent: usize) -> usize;
    /// Length of one agent's macro-observation feature vector.
    fn obs_dim(&self, agent: usize) -> usize;
    /// Episode horizon in primitive ticks.
    fn horizon(&self) -> u64;
    fn discount(&self) -> f64;

    /// Start a new episode and return the initial per-agent macro-observations.
    fn reset(&mut self, rng: &mut dyn rand::RngCore) -> Vec<MacroObservation>;
    /// Advance one primitive tick. Returns the shared reward and whether the
    /// episode ended (goal reached or horizon hit).
    fn step(
        &mut self,
        actions: &[usize],
        rng: &mut dyn rand::RngCore,
    ) -> Result<StepOutcome, CoreError>;
    /// The agent's current primitive-level view (post-step).
    fn view(&self, agent: usize) -> &Self::View;
    /// The agent's most recent macro-observation (computed once per tick
    /// inside `reset`/`step`; reading it is side-effect free).
    fn current_macro_obs(&self, agent: usize) -> MacroObservation;
}

/// Result of one primitive environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub done: bool,
}
