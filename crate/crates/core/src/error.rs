use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("zero has infinite valuation")]
    InfiniteValuation,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("matrix is singular")]
    Singular,
    #[error("input is not regular semisimple: {0}")]
    NotRss(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("additive character needs root-of-unity order p^{needed}, have p^{have}")]
    Precision { needed: u32, have: u32 },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("operation requires an inert configuration")]
    InertOnly,
    #[error("operation requires a split configuration")]
    SplitOnly,
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("generation failed after {attempts} attempts (seed {seed})")]
    Generation { attempts: usize, seed: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
