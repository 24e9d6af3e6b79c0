use num_complex::Complex64;
use serde::Serialize;

use super::LimitError;
use crate::linalg::{eigendecompose, inverse, ComplexMatrix};
use crate::model::{check_condition_a, BranchFit, Certificate, HyperbolicSystem};
use crate::perturbation::{reduce_semisimple_group, PerturbationFamily};

const PARTITION_TOLERANCE: f64 = 1e-9;
const CROSSING_DISTANCE: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct HighFrequencyGroup {
    /// Indices of the fitted branches `ν_ℓ` in this group.
    pub branches: Vec<usize>,
    pub representative: BranchFit,
    /// `ν_[j](w)`.
    pub alpha: f64,
    /// Columns of `R(w)` spanning this group.
    pub columns: Vec<usize>,
    /// Diagonal 0/1 projection selecting `columns`.
    pub pi: ComplexMatrix,
    pub betas: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub sub_projections: Vec<ComplexMatrix>,
    pub sub_nilpotents: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HighFrequencyExpansion {
    pub w: Vec<f64>,
    pub r: ComplexMatrix,
    pub groups: Vec<HighFrequencyGroup>,
    /// True when `R(w)` came from the numerical eigensolver rather than the system.
    pub numeric_diagonalizer: bool,
}

impl HighFrequencyExpansion {
    /// `{iζα_j + β_jm}` repeated by multiplicity, for `k = ζw`.
    pub fn predicted_eigenvalues(&self, zeta: f64) -> Vec<Complex64> {
        let mut out = Vec::new();
        for g in &self.groups {
            for (b, &m) in g.betas.iter().zip(&g.multiplicities) {
                for _ in 0..m {
                    out.push(Complex64::new(0.0, zeta * g.alpha) + b);
                }
            }
        }
        out
    }

    pub fn min_real_beta(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|g| g.betas.iter().map(|b| b.re))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fits the eigenvalue branches of `A(w)` with the condition-A checker and
/// expands at `w`.
pub fn high_frequency_expansion(
    sys: &HyperbolicSystem,
    w: &[f64],
) -> Result<HighFrequencyExpansion, LimitError> {
    let report = check_condition_a(sys, 512)?;
    if !report.passed {
        return Err(LimitError::ConditionViolated("A".into()));
    }
    let Certificate::Hyperbolicity { branches, .. } = report.certificate else {
        unreachable!("condition A returns a hyperbolicity certificate")
    };
    high_frequency_expansion_with(sys, &branches, w)
}

fn partition(branches: &[BranchFit]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    'outer: for (i, b) in branches.iter().enumerate() {
        for g in &mut groups {
            let r = &branches[g[0]];
            let same = (r.nu0 - b.nu0).abs() <= PARTITION_TOLERANCE
                && r.nu
                    .iter()
                    .zip(&b.nu)
                    .all(|(x, y)| (x - y).abs() <= PARTITION_TOLERANCE);
            if same {
                g.push(i);
                continue 'outer;
            }
        }
        groups.push(vec![i]);
    }
    groups
}

fn nudge(w: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(i, x)| x + CROSSING_DISTANCE * (1.0 + i as f64).sqrt())
        .collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= n;
    }
    v
}

fn on_crossing(groups: &[Vec<usize>], branches: &[BranchFit], w: &[f64], scale: f64) -> bool {
    let alphas: Vec<f64> = groups.iter().map(|g| branches[g[0]].eval(w)).collect();
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            if (alphas[i] - alphas[j]).abs() <= CROSSING_DISTANCE * scale {
                return true;
            }
        }
    }
    false
}

/// High-frequency expansion from precomputed branch fits.
pub fn high_frequency_expansion_with(
    sys: &HyperbolicSystem,
    branches: &[BranchFit],
    w: &[f64],
) -> Result<HighFrequencyExpansion, LimitError> {
    let parts = partition(branches);
    let scale = 1.0
        + branches
            .iter()
            .map(|b| b.nu0.abs() + b.nu.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
    let mut w = w.to_vec();
    if on_crossing(&parts, branches, &w, scale) {
        w = nudge(&w);
        if on_crossing(&parts, branches, &w, 1e-2 * scale) {
            return Err(LimitError::CrossingSetHit(w));
        }
    }
    let a = sys.a_of(&w);
    let (r, numeric) = match sys.r_at(&w) {
        Some(r) => (r, false),
        None => (eigendecompose(&a)?.vectors, true),
    };
    let ri = inverse(&r)?;
    let t0 = &(&ri * &a) * &r;
    let t1 = &(&ri * sys.b()) * &r;
    let diag: Vec<f64> = t0.diagonal().iter().map(|z| z.re).collect();
    let alphas: Vec<f64> = parts.iter().map(|g| branches[g[0]].eval(&w)).collect();
    let n = sys.size();
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
    for (c, &dval) in diag.iter().enumerate() {
        let j = (0..alphas.len())
            .min_by(|&x, &y| {
                (alphas[x] - dval)
                    .abs()
                    .total_cmp(&(alphas[y] - dval).abs())
            })
            .expect("at least one group");
        columns[j].push(c);
    }
    let family = PerturbationFamily::pencil(t0.clone(), t1)?;
    let mut groups = Vec::with_capacity(parts.len());
    for (j, part) in parts.iter().enumerate() {
        if columns[j].len() != part.len() {
            return Err(LimitError::CrossingSetHit(w.clone()));
        }
        let pi = ComplexMatrix::from_fn(n, n, |a, b| {
            if a == b && columns[j].contains(&a) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let reduced = reduce_semisimple_group(&family, Complex64::new(alphas[j], 0.0))?;
        groups.push(HighFrequencyGroup {
            branches: part.clone(),
            representative: branches[part[0]].clone(),
            alpha: alphas[j],
            columns: columns[j].clone(),
            pi,
            betas: reduced.sub_eigenvalues,
            multiplicities: reduced.multiplicities,
            sub_projections: reduced.sub_projections,
            sub_nilpotents: reduced.sub_nilpotents,
        });
    }
    Ok(HighFrequencyExpansion {
        w,
        r,
        groups,
        numeric_diagonalizer: numeric,
    })
}
