//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong, from bad inputs to numerical breakdown.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a precondition (dimension mismatch, point
    /// outside its domain, nonsensical parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A model failed structural validation (e.g. the rate family leaves
    /// the generator cone somewhere on the parameter box).
    #[error("model validation failed: {0}")]
    ModelValidation(String),

    /// The frozen chain has more than a one-dimensional kernel, so the
    /// stationary law is not unique.
    #[error("non-unique stationary law: {0}")]
    NonUniqueStationaryLaw(String),

    /// The estimated spectral gap is not positive somewhere on the grid.
    #[error("mixing violation: {0}")]
    MixingViolation(String),

    /// No uniform lower bound on the rates into the reference state.
    #[error("minorization failure: {0}")]
    MinorizationFailure(String),

    /// A post-step projection exceeded the drift budget; the step size is
    /// too large for the requested tolerance.
    #[error("integration drift: correction {magnitude:.3e} exceeds budget {budget:.3e}")]
    IntegrationDrift { magnitude: f64, budget: f64 },

    /// The adaptive controller pushed the step below its floor.
    #[error("stiffness: {0}")]
    Stiffness(String),

    /// A state became non-finite during integration.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A delta value has no column tag under the default naming scheme.
    #[error("naming scheme: {0}")]
    NamingScheme(String),

    /// Configuration file could not be read or parsed into a valid model.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
