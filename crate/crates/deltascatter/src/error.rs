//! Crate-wide error type. Diagnostic payloads are carried as `f64` so the
//! error type stays independent of the scalar parameter.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside a function's mathematical domain.
    #[error("domain error: {context}")]
    Domain { context: &'static str },

    #[error("wavenumber must be positive and finite, got {k}")]
    NonPositiveWavenumber { k: f64 },

    #[error("scene must contain at least one scatterer")]
    EmptyScene,

    #[error("scatterer {index} has zero coupling")]
    ZeroCoupling { index: usize },

    #[error("scatterer {index} has a non-finite coupling or a position that is not a finite {expected}-vector")]
    BadScatterer { index: usize, expected: usize },

    #[error("subtraction constants must match the scatterer count {expected}, got {actual}")]
    SubtractionConstantsLength { expected: usize, actual: usize },

    #[error("subtraction constants apply only to the standard renormalized formulation")]
    SubtractionConstantsForbidden,

    /// DFSS kernels are only derived for collinear centers.
    #[error("DFSS requires collinear centers: max deviation {max_deviation:e} exceeds tolerance {tolerance:e}")]
    NonCollinearDfss { max_deviation: f64, tolerance: f64 },

    /// Coincident centers make the standard off-diagonal kernel diverge.
    #[error("scatterers {first} and {second} coincide; the standard kernel diverges at zero separation")]
    DuplicatePositionStandard { first: usize, second: usize },

    #[error("kernel singularity: scatterers {first} and {second} are inside the coincidence guard (k*l = {k_ell:e})")]
    KernelSingularity { first: usize, second: usize, k_ell: f64 },

    #[error("configuration mismatch: {context}")]
    ConfigMismatch { context: &'static str },

    /// The interaction matrix is numerically non-invertible.
    #[error("spectral singularity: interaction matrix is numerically singular (condition estimate {rcond:e})")]
    SpectralSingularity { rcond: f64 },

    #[error("wavefunction requested at the center of scatterer {index}")]
    EvaluationAtCenter { index: usize },

    #[error("renormalized coupling diverges: the subtracted inverse coupling vanishes")]
    InfiniteCoupling,

    #[error("coupling matching is singular (vanishing denominator)")]
    MatchingSingularity,

    /// A truncated cutoff expansion was requested outside its range of validity.
    #[error("cutoff accuracy: {context}")]
    CutoffAccuracy { context: &'static str },

    #[error("quadrature budget exhausted after {evaluations} evaluations")]
    QuadratureBudget { evaluations: usize },

    #[error("extrapolation failed to converge: {context}")]
    ExtrapolationFailure { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
