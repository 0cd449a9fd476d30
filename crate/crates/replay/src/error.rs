use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("tick data covers {got} agents, buffer has {expected}")]
    RowLengthMismatch { expected: usize, got: usize },
    #[error("no episode in progress; call begin_episode first")]
    NoEpisodeInProgress,
    #[error("an episode is still in progress")]
    EpisodeInProgress,
    #[error("cannot squeeze an empty trace")]
    EmptyTrace,
    #[error("buffer is empty")]
    BufferEmpty,
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot format: {0}")]
    Format(String),
}
