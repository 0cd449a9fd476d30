//! Replay buffers for macro-action trajectories.
//!
//! Two buffer shapes exist. The per-agent buffer stores one row per agent per
//! episode, recorded concurrently at every primitive tick; each agent's row is
//! squeezed independently at its own macro boundaries. The joint buffer stores
//! a single row whose segments end whenever *any* agent's macro-action
//! terminates, and each squeezed entry keeps the mask of agents still running
//! for conditional bootstrap restriction.

mod buffer;
mod error;
mod record;
mod sample;
mod snapshot;
mod squeeze;

pub use buffer::{AgentTickData, ConcurrentReplayBuffer, JointReplayBuffer};
pub use error::ReplayError;
pub use record::{AgentStepRecord, JointStepRecord};
pub use sample::{pad_batch, PaddedBatch, SampleMode};
pub use squeeze::{
    squeeze_agent_trace, squeeze_joint_trace, AgentSqueezedEntry, JointSqueezedEntry,
    SqueezedTrace,
};
