//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type for model, quadrature, distribution and solver operations.
#[derive(Debug, Error)]
pub enum HoromapError {
    /// A Casimir parameter mu <= 0 whose sqrt(1 - mu) is not close to an odd integer.
    #[error("mu = {mu} is not a discrete-series parameter: sqrt(1 - mu) = {nu} is {distance:.3e} away from the nearest odd integer (tolerance 1e-9)")]
    InvalidDiscreteParameter { mu: f64, nu: f64, distance: f64 },

    /// Evaluation point outside the chart domain (e.g. |theta| >= pi/2, Im z <= 0, |xi| >= 1).
    #[error("point outside chart domain: {0}")]
    DomainError(String),

    /// Coefficient index outside the admissible range for the series.
    #[error("index {k} outside admissible range {detail}")]
    IndexError { k: i64, detail: String },

    /// Integrand tail decays too slowly for the requested integral.
    #[error("tail divergence: sampled decay exponent {exponent:.3} <= 1")]
    TailDivergence { exponent: f64 },

    /// Oscillatory quadrature failed its refinement check.
    #[error("oscillation underresolved at frequency {xi}: refinement changed the value by {delta:.3e}")]
    OscillationUnderresolved { xi: f64, delta: f64 },

    /// Graded mesh failed to stabilize a singular integral.
    #[error("singularity resolution failure: refinement changed the value by {delta:.3e} (tolerance {tol:.3e})")]
    SingularityResolutionFailure { delta: f64, tol: f64 },

    /// Sample-based coefficient recovery did not reproduce the samples.
    #[error("ill-conditioned coefficient recovery: round-trip residual {residual:.3e} exceeds {tol:.3e}")]
    IllConditioned { residual: f64, tol: f64 },

    /// Input fails a required annihilation condition.
    #[error("input not in the required annihilator: |{what}| = {value:.3e} exceeds {tol:.3e}")]
    NotInAnnihilator { what: String, value: f64, tol: f64 },

    /// A tracked obstruction is nonzero, so no solution exists in the annihilator.
    #[error("obstruction {what} = {value:.3e} is nonzero (tolerance {tol:.3e})")]
    ObstructionNonzero { what: String, value: f64, tol: f64 },

    /// Decay fit failed, so no honest tail bound is available.
    #[error("tail bound unavailable: {0}")]
    TailBoundUnavailable(String),

    /// A computed residual exceeded its tolerance.
    #[error("residual {value:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { value: f64, tol: f64 },

    /// Requested index is outside the supported set (e.g. discrete dual k <= 0).
    #[error("unsupported index {k}: {detail}")]
    UnsupportedIndex { k: i64, detail: String },

    /// A truncated series could not meet its tolerance.
    #[error("series truncation failure: {0}")]
    SeriesTruncationFailure(String),

    /// Derivative order above the supported cap.
    #[error("derivative order {r} exceeds supported maximum {max}")]
    DerivativeOrderTooLarge { r: usize, max: usize },

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HoromapError>;
