//! Parabolic limits and decay-rate verification for partially dissipative
//! linear hyperbolic systems `∂ₜu + Σ Aʲ∂ⱼu + Bu = 0`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chapman_enskog;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod spectral;

pub use chapman_enskog::{
    HighFrequencyExpansion, LimitError, LowFrequencyExpansion, ParabolicLimit,
};
pub use harness::{DecayReport, ExperimentConfig, HarnessError};
pub use linalg::{ComplexMatrix, Contour, EigenSystem, LinalgError};
pub use model::{ConditionReport, HyperbolicSystem, ModelError};
pub use num_complex::Complex64;
pub use perturbation::{GroupExpansion, PerturbationError, PerturbationFamily, ReducedGroup};
pub use spectral::{CutoffSpec, GridField, PeriodicGrid, SpectralError};

/// Any error raised by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}
