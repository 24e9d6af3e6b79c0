//! Periodic-box spectral evolution of `∂ₜu + ΣAʲ∂ⱼu + Bu = 0` and its parabolic profiles.

mod cutoff;
mod evolve;
mod field;
mod initial;
mod snapshot;

pub use cutoff::{psi, CutoffSpec};
pub use evolve::{
    check_wrap_around, evolve_hyperbolic, evolve_parabolic_phi, evolve_parabolic_psi,
    max_wave_speed, radial_weight, split_frequencies, SplitEvolver,
};
pub use field::{GridField, PeriodicGrid, Representation};
pub use initial::{make_initial_data, DataNorms, InitialData, InitialKind, TAIL_RADIUS_FACTOR};
pub use snapshot::{read_snapshot, write_snapshot};

use thiserror::Error;

use crate::chapman_enskog::LimitError;
use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("field is in {found:?} representation, expected {expected:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
    #[error("field shapes differ")]
    ShapeMismatch,
    #[error("initial data support {support} too wide for half-width {half_width}")]
    SupportTooWide { support: f64, half_width: f64 },
    #[error("wave speed {speed} times horizon {horizon} plus support {support} exceeds half the box ({half})")]
    WrapAround {
        speed: f64,
        horizon: f64,
        support: f64,
        half: f64,
    },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}
