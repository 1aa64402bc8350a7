use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid range: {0}")]
    Range(String),

    #[error("log-radius overflow: {0}")]
    Overflow(String),

    #[error("iteration of {requested} steps exceeds the cap of {cap}; use fast_forward for long orbits")]
    IterationCap { requested: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
