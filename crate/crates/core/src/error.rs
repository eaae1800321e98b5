use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("no representation of length at most {cap} exists; raise the cap")]
    CapExceeded { cap: u32 },
    #[error("element budget of {budget} exceeded")]
    ResourceLimit { budget: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no level up to {max_level} validates; counts first diverge at n = {first_mismatch}")]
    StabilizationFailure {
        max_level: usize,
        first_mismatch: usize,
    },
    #[error("sphere of radius {0} is empty")]
    EmptySphere(usize),
    #[error("eigen-solve did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
