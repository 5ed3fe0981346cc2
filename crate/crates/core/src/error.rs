//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Chain length outside the supported range.
    #[error("chain size out of range: {0}")]
    Size(String),

    /// Left/right partition does not fit the chain.
    #[error("invalid partition: {0}")]
    Partition(String),

    /// Unknown named product state.
    #[error("unknown state name: {0}")]
    Naming(String),

    /// Inputs that must refer to the same basis or dimension do not.
    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    /// A numerical routine failed to converge or produced an invalid result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Time series is not on a uniform grid.
    #[error("non-uniform sampling: {0}")]
    Sampling(String),

    /// Time series too short for the requested window analysis.
    #[error("series too short: {0}")]
    Windowing(String),

    /// Parameter or configuration rejected by validation.
    #[error("invalid parameter: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
