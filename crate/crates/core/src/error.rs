use thiserror::Error;

/// Errors produced by game construction, solvers, and the dynamics engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid declaration: {0}")]
    InvalidDeclaration(String),

    #[error("degenerate (weak-dominance) game: {0}")]
    DegenerateGame(String),

    #[error("agent spec does not fit the game: {0}")]
    AgentGameMismatch(String),

    #[error("invalid agent spec: {0}")]
    InvalidAgentSpec(String),

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    #[error("no unique limit distribution: {0}")]
    NoUniqueLimit(String),

    #[error("insufficient checkpoints: {0}")]
    InsufficientCheckpoints(String),
}

pub type Result<T> = std::result::Result<T, Error>;
