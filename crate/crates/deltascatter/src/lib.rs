//! Scattering amplitudes and cross-sections of multi-delta-function point
//! scatterers in two and three dimensions.
//!
//! Two rival treatments are implemented behind one interface:
//!
//! * **Standard renormalized** — the Lippmann–Schwinger route. Its
//!   interaction kernel (`H0^(1)` in 2D, an outgoing exponential over the
//!   distance in 3D) diverges when two centers approach each other, so the
//!   amplitude of a fixed-coupling scene collapses to zero in that limit
//!   instead of reducing to a single merged scatterer.
//! * **DFSS** — the dynamical formulation of stationary scattering. For
//!   collinear centers its kernels (`J0` in 2D, a cardinal sine in 3D) are
//!   finite at every separation, the couplings are physical as given, and
//!   merging scatterers commutes with the amplitude.
//!
//! The crate provides kernels and dense complex solves ([`kernel`],
//! [`solve`]), amplitudes, closed forms and wavefunctions ([`amplitude`]),
//! cutoff regularization and coupling matching ([`renorm`]), merging and
//! coincidence-limit studies ([`coincidence`]), the special functions
//! behind all of it ([`specfun`]), and independent quadrature oracles that
//! re-derive the closed forms numerically ([`oracle`]).
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below fix `f64` for ordinary use.

pub mod amplitude;
pub mod coincidence;
pub mod error;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod renorm;
pub mod scalar;
pub mod solve;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;

/// `f64` instantiations of the core types.
pub type Scatterer64 = model::Scatterer<f64>;
pub type SceneConfig64 = model::SceneConfig<f64>;
pub type Scene64 = model::Scene<f64>;
pub type DirectionPair64 = model::DirectionPair<f64>;
pub type InteractionMatrix64 = kernel::InteractionMatrix<f64>;
pub type AmplitudeResult64 = amplitude::AmplitudeResult<f64>;
pub type SolveDiagnostics64 = solve::SolveDiagnostics<f64>;
pub type LimitStudy64 = coincidence::LimitStudy<f64>;
pub type MergePlan64 = coincidence::MergePlan<f64>;
pub type QuadratureResult64 = oracle::QuadratureResult<f64>;
