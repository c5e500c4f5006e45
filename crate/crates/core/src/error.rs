use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ordinal: {0}")]
    Ordinal(String),

    #[error("invalid window: {0}")]
    Window(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty point set")]
    EmptySet,

    #[error("invalid cover: {0}")]
    Cover(String),

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("brute force guard: {colors}^{points} colorings exceeds 2^28")]
    BruteForceGuard { colors: usize, points: usize },

    #[error("solver budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("invalid set system: {0}")]
    SetSystem(String),

    #[error("result cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
