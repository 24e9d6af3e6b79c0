//! Parabolic limit and low/high-frequency spectral expansions of the symbol `E(ik)`.

mod high;
mod sweep;

pub use high::{
    high_frequency_expansion, high_frequency_expansion_with, HighFrequencyExpansion,
    HighFrequencyGroup,
};
pub use sweep::{eigenvalue_sweep, MergeEvent, SweepPoint, SweepResult};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    cluster_tolerance, cluster_values, contour_projection, eigenvalues, reduced_resolvent,
    ComplexMatrix, Contour, LinalgError,
};
use crate::model::{
    check_condition_b, check_condition_d, sphere_samples, HyperbolicSystem, ModelError,
    SamplingOptions,
};
use crate::perturbation::PerturbationError;

pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("condition B fails: {0}")]
    ConditionBViolated(String),
    #[error("condition {0} fails")]
    ConditionViolated(String),
    #[error("0-group of E(ik) at k = {k:?} is not separated (gap {gap:e})")]
    GroupNotSeparated { k: Vec<f64>, gap: f64 },
    #[error("direction {0:?} lies on an eigenvalue crossing set of A(w)")]
    CrossingSetHit(Vec<f64>),
    #[error("coefficient has imaginary part {0:e}")]
    ComplexCoefficient(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
}

/// Drift `c`, diffusion `D` and the projection data at `k = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ParabolicLimit {
    pub c: Vec<f64>,
    pub d: Vec<Vec<f64>>,
    pub p0: ComplexMatrix,
    pub q0: ComplexMatrix,
    /// `P1[h] = -P0·Aʰ·Q0 - Q0·Aʰ·P0`.
    pub p1: Vec<ComplexMatrix>,
    /// Largest imaginary part dropped from the traces defining `c` and `D`.
    pub discarded_imag: f64,
}

impl ParabolicLimit {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// `c·ik + k·Dk`.
    pub fn lambda0(&self, k: &[f64]) -> Complex64 {
        let drift: f64 = self.c.iter().zip(k).map(|(c, k)| c * k).sum();
        Complex64::new(self.quadratic_form(k), drift)
    }

    pub fn quadratic_form(&self, k: &[f64]) -> f64 {
        let mut s = 0.0;
        for (h, kh) in k.iter().enumerate() {
            for (l, kl) in k.iter().enumerate() {
                s += kh * self.d[h][l] * kl;
            }
        }
        s
    }

    /// `P0 + Σ ikₕ P1ₕ`.
    pub fn projection_series(&self, k: &[f64]) -> ComplexMatrix {
        let mut p = self.p0.clone();
        for (p1, &kh) in self.p1.iter().zip(k) {
            p += &p1.scale(Complex64::new(0.0, kh));
        }
        p
    }

    /// Smallest eigenvalue of the symmetric part of `D`.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let sym: Vec<f64> = (0..d * d)
            .map(|idx| {
                let (i, j) = (idx / d, idx % d);
                0.5 * (self.d[i][j] + self.d[j][i])
            })
            .collect();
        crate::linalg::symmetric_eigen(&sym, d)
            .map(|e| e.values[0])
            .unwrap_or(f64::NAN)
    }
}

/// Spectral group of `B` away from zero.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralGroup {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub projection: ComplexMatrix,
    pub nilpotent: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowFrequencyExpansion {
    pub limit: ParabolicLimit,
    pub other_groups: Vec<SpectralGroup>,
}

impl LowFrequencyExpansion {
    /// `λ0(ik) ≈ c·ik + k·Dk`.
    pub fn lambda0(&self, k: &[f64]) -> Complex64 {
        self.limit.lambda0(k)
    }
}

fn zero_contour(b: &ComplexMatrix) -> Result<Contour, LimitError> {
    let vals = eigenvalues(b)?;
    let tol = cluster_tolerance(b);
    let members: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].norm() <= tol).collect();
    if members.len() != 1 {
        return Err(LimitError::ConditionBViolated(format!(
            "eigenvalue 0 has multiplicity {}",
            members.len()
        )));
    }
    let mut c = Contour::around_members(&vals, &members)?;
    c.center = Complex64::new(0.0, 0.0);
    Ok(c)
}

pub fn compute_parabolic_limit(sys: &HyperbolicSystem) -> Result<ParabolicLimit, LimitError> {
    let report = check_condition_b(sys)?;
    if !report.passed {
        return Err(LimitError::ConditionBViolated(report.notes.join("; ")));
    }
    let b = sys.b();
    let contour = zero_contour(b)?;
    let p0 = contour_projection(b, &contour)?;
    let q0 = reduced_resolvent(b, Complex64::new(0.0, 0.0), &contour)?;
    let d = sys.dim();
    let a = sys.a();
    let mut imag: f64 = 0.0;
    let c: Vec<f64> = a
        .iter()
        .map(|ah| {
            let t = (ah * &p0).trace();
            imag = imag.max(t.im.abs());
            t.re
        })
        .collect();
    let ap: Vec<ComplexMatrix> = a.iter().map(|ah| ah * &p0).collect();
    let aq: Vec<ComplexMatrix> = a.iter().map(|ah| ah * &q0).collect();
    let mut dm = vec![vec![0.0; d]; d];
    for h in 0..d {
        for l in 0..d {
            let t = ((&ap[h] * &aq[l]).trace() + (&aq[h] * &ap[l]).trace()) * 0.5;
            imag = imag.max(t.im.abs());
            dm[h][l] = t.re;
        }
    }
    if imag > IMAGINARY_TOLERANCE {
        return Err(LimitError::ComplexCoefficient(imag));
    }
    log::debug!("parabolic limit: discarded imaginary part {imag:e}");
    let p1 = a
        .iter()
        .map(|ah| -&(&(&(&p0 * ah) * &q0) + &(&(&q0 * ah) * &p0)))
        .collect();
    Ok(ParabolicLimit {
        c,
        d: dm,
        p0,
        q0,
        p1,
        discarded_imag: imag,
    })
}

pub fn low_frequency_expansion(
    sys: &HyperbolicSystem,
) -> Result<LowFrequencyExpansion, LimitError> {
    let opts = SamplingOptions::default();
    let dr = check_condition_d(sys, opts.radial_samples, opts.sphere_samples)?;
    if !dr.passed {
        return Err(LimitError::ConditionViolated("D".into()));
    }
    let limit = compute_parabolic_limit(sys)?;
    let b = sys.b();
    let vals = eigenvalues(b)?;
    let tol = cluster_tolerance(b);
    let mut other_groups = Vec::new();
    for cl in cluster_values(&vals, tol) {
        if cl.center.norm() <= tol {
            continue;
        }
        let contour = Contour::around_members(&vals, &cl.members)?;
        let projection = contour_projection(b, &contour)?;
        let nilpotent = &b.shift(-cl.center) * &projection;
        other_groups.push(SpectralGroup {
            eigenvalue: cl.center,
            multiplicity: cl.multiplicity,
            projection,
            nilpotent,
        });
    }
    Ok(LowFrequencyExpansion {
        limit,
        other_groups,
    })
}

/// The eigenvalue of `E(ik)` nearest 0 and its distance to the rest of the spectrum.
pub fn small_eigenvalue(sys: &HyperbolicSystem, k: &[f64]) -> Result<(Complex64, f64), LimitError> {
    let vals = eigenvalues(&sys.symbol(k).e)?;
    let (idx, _) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("n ≥ 1");
    let gap = vals
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, v)| (v - vals[idx]).norm())
        .fold(f64::INFINITY, f64::min);
    Ok((vals[idx], gap))
}

/// `P0(ik)` by contour integration around the eigenvalue of `E(ik)` nearest 0.
pub fn exact_group_projection(
    sys: &HyperbolicSystem,
    k: &[f64],
) -> Result<ComplexMatrix, LimitError> {
    let (lam, gap) = small_eigenvalue(sys, k)?;
    if gap.is_infinite() {
        return Ok(ComplexMatrix::identity(sys.size()));
    }
    if !(gap > 1e-8) || lam.norm() >= gap {
        return Err(LimitError::GroupNotSeparated { k: k.to_vec(), gap });
    }
    let contour = Contour::circle(lam, 0.5 * gap)?;
    Ok(contour_projection(&sys.symbol(k).e, &contour)?)
}

/// Largest radius `ε` on a geometric grid such that for every `|k| ≤ ε`
/// (sampled over directions) the 0-group gap stays above half its value at `k = 0`.
pub fn separation_radius(sys: &HyperbolicSystem) -> Result<f64, LimitError> {
    let (_, gap0) = small_eigenvalue(sys, &vec![0.0; sys.dim()])?;
    if !gap0.is_finite() {
        return Ok(f64::INFINITY);
    }
    let dirs = sphere_samples(sys.dim(), 64);
    let mut eps = 1e-3;
    let mut best = 0.0;
    while eps <= 1e3 {
        let mut ok = true;
        for w in &dirs {
            let k: Vec<f64> = w.iter().map(|x| x * eps).collect();
            let (lam, gap) = small_eigenvalue(sys, &k)?;
            if gap < 0.5 * gap0 || lam.norm() >= gap {
                ok = false;
                break;
            }
        }
        if !ok {
            break;
        }
        best = eps;
        eps *= 1.02;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{damped_euler_2d, goldstein_kac_1d, goldstein_kac_3d};

    #[test]
    fn euler_limit_is_heat_equation() {
        let lim = compute_parabolic_limit(&damped_euler_2d()).unwrap();
        assert!(lim.c.iter().all(|c| c.abs() < 1e-10));
        for h in 0..2 {
            for l in 0..2 {
                let e = if h == l { 1.0 } else { 0.0 };
                assert!((lim.d[h][l] - e).abs() < 1e-10);
            }
        }
        assert!((lim.p0.trace() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn zero_flux_gives_zero_limit() {
        let gk = goldstein_kac_1d();
        let sys = HyperbolicSystem::new(vec![ComplexMatrix::zeros(2, 2)], gk.b().clone()).unwrap();
        let lim = compute_parabolic_limit(&sys).unwrap();
        assert_eq!(lim.c, vec![0.0]);
        assert_eq!(lim.d, vec![vec![0.0]]);
        assert!(lim.p1[0].norm() == 0.0);
    }

    #[test]
    fn rejects_condition_b_failure() {
        let sys =
            HyperbolicSystem::new(vec![ComplexMatrix::identity(2)], ComplexMatrix::zeros(2, 2))
                .unwrap();
        assert!(matches!(
            compute_parabolic_limit(&sys),
            Err(LimitError::ConditionBViolated(_))
        ));
    }

    #[test]
    fn other_groups() {
        let e = low_frequency_expansion(&damped_euler_2d()).unwrap();
        assert_eq!(e.other_groups.len(), 1);
        assert_eq!(e.other_groups[0].multiplicity, 2);
        assert!((e.other_groups[0].eigenvalue - 1.0).norm() < 1e-12);
        assert!(e.other_groups[0].nilpotent.norm() < 1e-10);
        let sum = &e.other_groups[0].projection + &e.limit.p0;
        assert!(sum.distance(&ComplexMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn goldstein_kac_3d_degenerate_direction() {
        // velocities span a plane, so along its normal A(w) = 0 and E(ik) keeps the eigenvalue 0
        let sys = goldstein_kac_3d(0.5, 0.5, 0.5, None);
        let lim = compute_parabolic_limit(&sys).unwrap();
        assert!((lim.p0.trace() - 1.0).norm() < 1e-9);
        let v = crate::model::DEFAULT_GK3_VELOCITIES;
        let (p, q) = (
            [v[0][0] - v[1][0], v[0][1] - v[1][1], v[0][2] - v[1][2]],
            [v[1][0] - v[2][0], v[1][1] - v[2][1], v[1][2] - v[2][2]],
        );
        let w = [
            p[1] * q[2] - p[2] * q[1],
            p[2] * q[0] - p[0] * q[2],
            p[0] * q[1] - p[1] * q[0],
        ];
        let (lam, _) = small_eigenvalue(&sys, &w).unwrap();
        assert!(lam.norm() < 1e-12);
        assert!(lim.quadratic_form(&w).abs() < 1e-10);
    }

    #[test]
    fn exact_projection_at_zero() {
        let sys = goldstein_kac_1d();
        let lim = compute_parabolic_limit(&sys).unwrap();
        let p = exact_group_projection(&sys, &[0.0]).unwrap();
        assert!(p.distance(&lim.p0) < 1e-12);
        let p = exact_group_projection(&sys, &[0.01]).unwrap();
        assert!(p.distance(&lim.projection_series(&[0.01])) < 1e-3);
        assert!((&p * &p).distance(&p) < 1e-9);
    }

    #[test]
    fn goldstein_kac_separation_radius() {
        let eps = separation_radius(&goldstein_kac_1d()).unwrap();
        let exact = 3f64.sqrt() / 4.0;
        assert!(eps <= exact && eps > exact / 1.02, "{eps}");
    }
}
