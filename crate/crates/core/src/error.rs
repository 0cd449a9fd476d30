use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("agent {agent} has no active macro-action")]
    NoActiveMacro { agent: usize },
    #[error("agent {agent} controller emitted primitive action {action}, valid range 0..{count}")]
    InvalidPrimitiveAction {
        agent: usize,
        action: usize,
        count: usize,
    },
    #[error("agent {agent} macro {macro_id} terminator returned {value}, expected [0,1]")]
    TerminatorOutOfRange {
        agent: usize,
        macro_id: usize,
        value: f64,
    },
    #[error("no available macro-action for agent {agent}")]
    NoAvailableMacro { agent: usize },
    #[error("invalid environment configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid action index {action} for agent {agent}")]
    InvalidAction { agent: usize, action: usize },
}
