//! Fixtures shared by the benchmarks.

use hyperdiff::model::{damped_euler_2d, goldstein_kac_1d};
use hyperdiff::spectral::{make_initial_data, InitialKind};
use hyperdiff::{Complex64, ComplexMatrix, GridField, HyperbolicSystem, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense complex matrix with entries uniform in the unit square.
pub fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// A system together with a Gaussian on a grid of `n` points per axis.
pub fn gaussian_problem(d: usize, n: usize) -> (HyperbolicSystem, GridField) {
    let sys = if d == 1 {
        goldstein_kac_1d()
    } else {
        damped_euler_2d()
    };
    let grid = PeriodicGrid::new(d, n, 40.0).expect("power-of-two grid");
    let kind = InitialKind::Gaussian {
        sigma: 1.0,
        center: None,
        weights: None,
    };
    let data = make_initial_data(grid, sys.size(), &kind, 0).expect("gaussian fits");
    (sys, data.field)
}
