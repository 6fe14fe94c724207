use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("coframe mismatch: {0}")]
    CoframeMismatch(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("zero-holonomy condition violated: {0}")]
    ZeroHolonomy(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
