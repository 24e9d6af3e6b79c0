use std::sync::Arc;

use super::{Diagonalizer, HyperbolicSystem, ModelError};
use crate::linalg::ComplexMatrix;

/// Zero-mean species velocities used when none are given.
pub const DEFAULT_GK3_VELOCITIES: [[f64; 3]; 3] =
    [[1.0, 0.3, -0.2], [-0.4, 1.0, 0.5], [-0.6, -1.3, -0.3]];

fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).expect("builtin matrices are rectangular")
}

/// One-dimensional two-speed Goldstein–Kac system.
pub fn goldstein_kac_1d() -> HyperbolicSystem {
    HyperbolicSystem::new(
        vec![ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])],
        real(&[vec![0.5, -0.5], vec![-0.5, 0.5]]),
    )
    .expect("valid builtin")
    .named("goldstein-kac-1d")
    .with_diagonalizer(Diagonalizer::ClosedForm(Arc::new(|_| {
        ComplexMatrix::identity(2)
    })))
    .expect("valid builtin")
    .with_symmetry(real(&[vec![0.0, 1.0], vec![1.0, 0.0]]))
    .expect("valid builtin")
}

/// Three-species Goldstein–Kac system in three dimensions with transition
/// rates `a, b, c` and species velocities `velocities[i] = (vᵢ¹, vᵢ², vᵢ³)`.
pub fn goldstein_kac_3d(
    a: f64,
    b: f64,
    c: f64,
    velocities: Option<[[f64; 3]; 3]>,
) -> HyperbolicSystem {
    let v = velocities.unwrap_or(DEFAULT_GK3_VELOCITIES);
    let aj: Vec<ComplexMatrix> = (0..3)
        .map(|j| ComplexMatrix::from_real_diagonal(&[v[0][j], v[1][j], v[2][j]]))
        .collect();
    let bm = real(&[
        vec![b + c, -c, -b],
        vec![-c, a + c, -a],
        vec![-b, -a, a + b],
    ]);
    HyperbolicSystem::new(aj, bm)
        .expect("valid builtin")
        .named("goldstein-kac-3d")
        .with_diagonalizer(Diagonalizer::ClosedForm(Arc::new(|_| {
            ComplexMatrix::identity(3)
        })))
        .expect("valid builtin")
}

/// Linearized damped compressible Euler system in two dimensions,
/// `(ρ, v₁, v₂)` with friction on the velocity.
pub fn damped_euler_2d() -> HyperbolicSystem {
    let a1 = real(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
    ]);
    let a2 = real(&[
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
    ]);
    let b = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]);
    let r = |w: &[f64]| {
        let (w1, w2) = (w[0], w[1]);
        real(&[
            vec![0.5, 0.0, 0.5],
            vec![-0.5 * w1, w2, 0.5 * w1],
            vec![-0.5 * w2, -w1, 0.5 * w2],
        ])
    };
    HyperbolicSystem::new(vec![a1, a2], b)
        .expect("valid builtin")
        .named("damped-euler-2d")
        .with_diagonalizer(Diagonalizer::ClosedForm(Arc::new(r)))
        .expect("valid builtin")
        .with_symmetry(ComplexMatrix::from_real_diagonal(&[-1.0, 1.0, 1.0]))
        .expect("valid builtin")
}

pub fn builtin_names() -> &'static [&'static str] {
    &["goldstein-kac-1d", "goldstein-kac-3d", "damped-euler-2d"]
}

pub fn builtin_system(name: &str) -> Result<HyperbolicSystem, ModelError> {
    match name {
        "goldstein-kac-1d" => Ok(goldstein_kac_1d()),
        "goldstein-kac-3d" => Ok(goldstein_kac_3d(0.5, 0.5, 0.5, None)),
        "damped-euler-2d" => Ok(damped_euler_2d()),
        other => Err(ModelError::UnknownBuiltin(other.to_string())),
    }
}
