//! Partially dissipative hyperbolic systems `∂ₜu + Σ Aʲ∂ⱼu + Bu = 0` and
//! sampled checks of their structural conditions.

mod builtin;
mod conditions;
mod io;

pub use builtin::{
    builtin_names, builtin_system, damped_euler_2d, goldstein_kac_1d, goldstein_kac_3d,
    DEFAULT_GK3_VELOCITIES,
};
pub use conditions::{
    check_all, check_condition_a, check_condition_b, check_condition_d, check_condition_r,
    check_condition_s, BranchFit, Certificate, ConditionReport, ConditionTag, SamplingOptions,
};
pub use io::{load_system, parse_system, resolve_system};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("matrix {0} has a non-real entry")]
    NonReal(String),
    #[error("ragged array in {0}")]
    Ragged(String),
    #[error("cannot parse system file: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown builtin system `{0}`")]
    UnknownBuiltin(String),
    #[error("condition R needs a diagonalizer R(w)")]
    MissingDiagonalizer,
    #[error("eigenvalue branch tracking is ambiguous at w = {0:?}")]
    BranchTrackingFailed(Vec<f64>),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type ClosedFormDiagonalizer = Arc<dyn Fn(&[f64]) -> ComplexMatrix + Send + Sync>;

/// Eigenvector matrix `R(w)` of `A(w)`, either as a formula or at sample directions.
#[derive(Clone)]
pub enum Diagonalizer {
    ClosedForm(ClosedFormDiagonalizer),
    Sampled(Vec<(Vec<f64>, ComplexMatrix)>),
}

impl fmt::Debug for Diagonalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ClosedForm(_) => write!(f, "ClosedForm(..)"),
            Self::Sampled(s) => write!(f, "Sampled({} samples)", s.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HyperbolicSystem {
    pub name: String,
    d: usize,
    n: usize,
    a: Vec<ComplexMatrix>,
    b: ComplexMatrix,
    r: Option<Diagonalizer>,
    s: Option<ComplexMatrix>,
}

/// The symbol `E = B + iΣ Aʲkⱼ` at one frequency.
#[derive(Debug, Clone)]
pub struct SymbolSample {
    pub k: Vec<f64>,
    pub e: ComplexMatrix,
}

fn check_real(name: &str, m: &ComplexMatrix) -> Result<(), ModelError> {
    if m.is_exactly_real() {
        Ok(())
    } else {
        Err(ModelError::NonReal(name.to_string()))
    }
}

impl HyperbolicSystem {
    pub fn new(a: Vec<ComplexMatrix>, b: ComplexMatrix) -> Result<Self, ModelError> {
        let d = a.len();
        if d == 0 {
            return Err(ModelError::InvalidSystem(
                "at least one matrix Aʲ is required".into(),
            ));
        }
        let n = b.rows();
        if n == 0 || !b.is_square() {
            return Err(ModelError::InvalidSystem(format!(
                "B must be square and nonempty, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        check_real("B", &b)?;
        for (j, aj) in a.iter().enumerate() {
            if aj.rows() != n || aj.cols() != n {
                return Err(ModelError::InvalidSystem(format!(
                    "A{} is {}x{}, expected {n}x{n}",
                    j + 1,
                    aj.rows(),
                    aj.cols()
                )));
            }
            check_real(&format!("A{}", j + 1), aj)?;
        }
        Ok(Self {
            name: String::from("system"),
            d,
            n,
            a,
            b,
            r: None,
            s: None,
        })
    }

    pub fn from_real(a: &[Vec<Vec<f64>>], b: &[Vec<f64>]) -> Result<Self, ModelError> {
        let am = a
            .iter()
            .enumerate()
            .map(|(j, rows)| {
                ComplexMatrix::from_real_rows(rows)
                    .map_err(|_| ModelError::Ragged(format!("A{}", j + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let bm = ComplexMatrix::from_real_rows(b).map_err(|_| ModelError::Ragged("B".into()))?;
        Self::new(am, bm)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_diagonalizer(mut self, r: Diagonalizer) -> Result<Self, ModelError> {
        if let Diagonalizer::Sampled(samples) = &r {
            for (w, m) in samples {
                if w.len() != self.d || m.rows() != self.n || m.cols() != self.n {
                    return Err(ModelError::InvalidSystem(
                        "R sample has the wrong shape".into(),
                    ));
                }
                check_real("R", m)?;
            }
        }
        self.r = Some(r);
        Ok(self)
    }

    pub fn with_symmetry(mut self, s: ComplexMatrix) -> Result<Self, ModelError> {
        if s.rows() != self.n || s.cols() != self.n {
            return Err(ModelError::InvalidSystem("S has the wrong shape".into()));
        }
        check_real("S", &s)?;
        self.s = Some(s);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[ComplexMatrix] {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn diagonalizer(&self) -> Option<&Diagonalizer> {
        self.r.as_ref()
    }

    pub fn symmetry(&self) -> Option<&ComplexMatrix> {
        self.s.as_ref()
    }

    /// `A(w) = Σ Aʲwⱼ`.
    pub fn a_of(&self, w: &[f64]) -> ComplexMatrix {
        assert_eq!(w.len(), self.d, "direction has the wrong dimension");
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for (aj, &wj) in self.a.iter().zip(w) {
            if wj != 0.0 {
                out += &aj.scale_real(wj);
            }
        }
        out
    }

    /// `E(ik) = B + iA(k)`.
    pub fn symbol(&self, k: &[f64]) -> SymbolSample {
        let mut e = self.b.clone();
        e += &self.a_of(k).scale(Complex64::i());
        SymbolSample { k: k.to_vec(), e }
    }

    /// `R(w)` from the closed form, or from a stored sample matching `w` to 1e-12.
    pub fn r_at(&self, w: &[f64]) -> Option<ComplexMatrix> {
        match self.r.as_ref()? {
            Diagonalizer::ClosedForm(f) => Some(f(w)),
            Diagonalizer::Sampled(samples) => samples
                .iter()
                .find(|(sw, _)| sw.iter().zip(w).all(|(a, b)| (a - b).abs() <= 1e-12))
                .map(|(_, m)| m.clone()),
        }
    }
}

/// Deterministic quasi-uniform points on the unit sphere in `ℝᵈ`: `{±1}` for
/// d=1, an angular grid for d=2, a Fibonacci lattice for d=3, and seeded
/// normalized Gaussian draws above that.
pub fn sphere_samples(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..count)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * j as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x005a_3b1e);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}
