use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{sphere_samples, HyperbolicSystem, ModelError};
use crate::linalg::{
    cluster_tolerance, eigendecompose, eigenvalues, inverse, symmetric_eigen, ComplexMatrix,
};

pub const CONDITION_CAP: f64 = 1e6;
const BRANCH_STEP: f64 = 0.05;
const CROSSING_NUDGE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionTag {
    A,
    R,
    B,
    D,
    S,
}

#[derive(Debug, Clone, Copy)]
pub struct SamplingOptions {
    pub sphere_samples: usize,
    pub radial_samples: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            sphere_samples: 512,
            radial_samples: 61,
        }
    }
}

/// Affine fit `ν(w) = nu0 + nu·w` of one eigenvalue branch of `A(w)`.
#[derive(Debug, Clone, Serialize)]
pub struct BranchFit {
    pub nu0: f64,
    pub nu: Vec<f64>,
    pub residual: f64,
}

impl BranchFit {
    pub fn eval(&self, w: &[f64]) -> f64 {
        self.nu0 + self.nu.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Hyperbolicity {
        branches: Vec<BranchFit>,
        max_residual: f64,
        max_imag: f64,
        max_condition: f64,
        skipped_samples: Vec<Vec<f64>>,
    },
    ConstantDamping {
        reference: ComplexMatrix,
        max_deviation: f64,
    },
    SpectralSplit {
        zero_count: usize,
        sigma0: Vec<Complex64>,
        min_real_part: f64,
    },
    Dissipation {
        theta: f64,
    },
    Symmetry {
        s: Option<ComplexMatrix>,
        supplied: bool,
        commutator_residual: f64,
        anticommutator_residual: f64,
        null_dimension: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionTag,
    pub passed: bool,
    pub certificate: Certificate,
    /// Frequency `k` or direction `w` with the smallest margin.
    pub worst_sample: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

pub fn check_all(
    sys: &HyperbolicSystem,
    opts: SamplingOptions,
) -> Result<Vec<ConditionReport>, ModelError> {
    let mut out = vec![check_condition_a(sys, opts.sphere_samples)?];
    if sys.diagonalizer().is_some() {
        out.push(check_condition_r(sys, opts.sphere_samples)?);
    }
    let b = check_condition_b(sys)?;
    let b_ok = b.passed;
    out.push(b);
    if b_ok {
        out.push(check_condition_d(
            sys,
            opts.radial_samples,
            opts.sphere_samples,
        )?);
    }
    out.push(check_condition_s(sys)?);
    Ok(out)
}

/// `σ(B) = {0} ∪ σ₀` with `0` simple and `Re σ₀ ≥ 1e-8`.
pub fn check_condition_b(sys: &HyperbolicSystem) -> Result<ConditionReport, ModelError> {
    let vals = eigenvalues(sys.b())?;
    let tol = cluster_tolerance(sys.b());
    let zero_count = vals.iter().filter(|v| v.norm() <= tol).count();
    let sigma0: Vec<Complex64> = vals.iter().copied().filter(|v| v.norm() > tol).collect();
    let min_real_part = sigma0.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let passed = zero_count == 1 && min_real_part >= 1e-8;
    let mut notes = Vec::new();
    if zero_count != 1 {
        notes.push(format!("eigenvalue 0 has multiplicity {zero_count}"));
    }
    if min_real_part < 1e-8 {
        notes.push(format!(
            "an eigenvalue of B away from 0 has real part {min_real_part:e}"
        ));
    }
    Ok(ConditionReport {
        condition: ConditionTag::B,
        passed,
        certificate: Certificate::SpectralSplit {
            zero_count,
            sigma0,
            min_real_part,
        },
        worst_sample: (!passed).then(|| vec![0.0; sys.dim()]),
        notes,
    })
}

fn radial_grid(count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (count - 1) as f64))
        .collect()
}

/// Sampled estimate of `θ = inf Re λ(ik)·(1+|k|²)/|k|²`.
pub fn check_condition_d(
    sys: &HyperbolicSystem,
    radial_samples: usize,
    sphere: usize,
) -> Result<ConditionReport, ModelError> {
    let dirs = sphere_samples(sys.dim(), sphere);
    let radii = radial_grid(radial_samples);
    let ks: Vec<Vec<f64>> = radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |w| w.iter().map(|x| x * r).collect()))
        .collect();
    let thetas: Vec<(f64, Complex64)> = ks
        .par_iter()
        .map(|k| {
            let k2: f64 = k.iter().map(|x| x * x).sum();
            let vals = eigenvalues(&sys.symbol(k).e)?;
            let lam = vals
                .iter()
                .copied()
                .min_by(|a, b| a.re.total_cmp(&b.re))
                .expect("nonempty");
            Ok((lam.re * (1.0 + k2) / k2, lam))
        })
        .collect::<Result<_, ModelError>>()?;
    let mut best: Vec<(f64, Complex64, Vec<f64>)> = Vec::new();
    for (i, w) in dirs.iter().enumerate() {
        let (j, &(t, lam)) = (0..radii.len())
            .map(|j| (j, &thetas[j * dirs.len() + i]))
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("radial samples");
        best.push((t, lam, w.iter().map(|x| x * radii[j]).collect()));
    }
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    best.truncate(REFINE_STARTS);
    let refined: Vec<(f64, Complex64, Vec<f64>)> = best
        .par_iter()
        .map(|(t, lam, k)| refine_theta(sys, k, *t, *lam))
        .collect::<Result<_, ModelError>>()?;
    let (theta, lam, worst) = refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one sample");
    let passed = theta >= 1e-6;
    let mut notes = Vec::new();
    if !passed {
        notes.push(format!(
            "eigenvalue {lam} at k = {worst:?} is {}",
            if lam.re.abs() <= 1e-10 * (1.0 + lam.norm()) {
                "purely imaginary"
            } else {
                "insufficiently damped"
            }
        ));
    }
    Ok(ConditionReport {
        condition: ConditionTag::D,
        passed,
        certificate: Certificate::Dissipation { theta },
        worst_sample: Some(worst),
        notes,
    })
}

const REFINE_STARTS: usize = 4;
const REFINE_MAX_EVALS: usize = 4000;

fn damping_ratio(sys: &HyperbolicSystem, k: &[f64]) -> Result<(f64, Complex64), ModelError> {
    let k2: f64 = k.iter().map(|x| x * x).sum();
    let lam = eigenvalues(&sys.symbol(k).e)?
        .into_iter()
        .min_by(|a, b| a.re.total_cmp(&b.re))
        .expect("nonempty");
    Ok((lam.re * (1.0 + k2) / k2, lam))
}

/// Compass search over direction and `log|k|` from a sampled minimum, so that
/// isolated degenerate directions missed by the sphere samples are still found.
fn refine_theta(
    sys: &HyperbolicSystem,
    k0: &[f64],
    theta0: f64,
    lam0: Complex64,
) -> Result<(f64, Complex64, Vec<f64>), ModelError> {
    let d = k0.len();
    let r0 = k0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut w: Vec<f64> = k0.iter().map(|x| x / r0).collect();
    let mut log_r = r0.ln();
    let mut best = (theta0, lam0);
    let at = |w: &[f64], log_r: f64| -> Vec<f64> { w.iter().map(|x| x * log_r.exp()).collect() };
    let mut step = 0.1;
    let mut evals = 0;
    while step > 1e-10 && evals < REFINE_MAX_EVALS {
        let mut moved = false;
        for axis in 0..=d {
            for sign in [-1.0, 1.0] {
                let (mut cw, mut cr) = (w.clone(), log_r);
                if axis == d {
                    cr += sign * step * 10.0;
                    if cr.abs() > 3.0 * std::f64::consts::LN_10 {
                        continue;
                    }
                } else {
                    cw[axis] += sign * step;
                    normalize(&mut cw);
                }
                let cand = damping_ratio(sys, &at(&cw, cr))?;
                evals += 1;
                if cand.0 < best.0 - 1e-14 * best.0.abs().max(1e-3) {
                    best = cand;
                    w = cw;
                    log_r = cr;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((best.0, best.1, at(&w, log_r)))
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v {
        *x /= n;
    }
}

fn sorted_real_eigs(sys: &HyperbolicSystem, w: &[f64]) -> Result<Vec<f64>, ModelError> {
    let mut v: Vec<f64> = eigenvalues(&sys.a_of(w))?
        .into_iter()
        .map(|z| z.re)
        .collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Follows the eigenvalue branches of `A(w)` from `from` to `to` along the
/// great circle, predicting each step by extrapolation and matching greedily.
fn track_branches(
    sys: &HyperbolicSystem,
    from: &[f64],
    to: &[f64],
    start: &[f64],
    scale: f64,
) -> Result<Vec<f64>, ModelError> {
    let cosang = from
        .iter()
        .zip(to)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .clamp(-1.0, 1.0);
    let angle = cosang.acos();
    // unit tangent direction at `from`
    let mut u: Vec<f64> = to.iter().zip(from).map(|(t, f)| t - cosang * f).collect();
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if un < 1e-12 {
        if angle < 1e-12 {
            return sorted_real_eigs(sys, to);
        }
        // antipodal: any orthogonal direction
        let axis = (0..from.len())
            .min_by(|&i, &j| from[i].abs().total_cmp(&from[j].abs()))
            .expect("d ≥ 1");
        u = vec![0.0; from.len()];
        u[axis] = 1.0;
        let dot = from[axis];
        for (ui, fi) in u.iter_mut().zip(from) {
            *ui -= dot * fi;
        }
    }
    normalize(&mut u);
    let steps = ((angle / BRANCH_STEP).ceil() as usize).max(1);
    let mut history: Vec<Vec<f64>> = vec![start.to_vec()];
    for s in 1..=steps {
        let t = angle * s as f64 / steps as f64;
        let w: Vec<f64> = from
            .iter()
            .zip(&u)
            .map(|(f, ui)| t.cos() * f + t.sin() * ui)
            .collect();
        let vals = sorted_real_eigs(sys, &w)?;
        let h = history.len();
        let pred: Vec<f64> = (0..start.len())
            .map(|l| match h {
                1 => history[0][l],
                2 => 2.0 * history[1][l] - history[0][l],
                _ => 3.0 * history[h - 1][l] - 3.0 * history[h - 2][l] + history[h - 3][l],
            })
            .collect();
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        for (l, p) in pred.iter().enumerate() {
            for (j, v) in vals.iter().enumerate() {
                pairs.push((l, j, (p - v).abs()));
            }
        }
        pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let mut taken = vec![false; vals.len()];
        let mut assigned = vec![None; pred.len()];
        for (l, j, _) in pairs {
            if assigned[l].is_none() && !taken[j] {
                assigned[l] = Some(j);
                taken[j] = true;
            }
        }
        let distinct = 1e-9 * scale;
        for (l, p) in pred.iter().enumerate() {
            let j = assigned[l].expect("square assignment");
            let d1 = (p - vals[j]).abs();
            let d2 = vals
                .iter()
                .filter(|v| (*v - vals[j]).abs() > distinct)
                .map(|v| (p - v).abs())
                .fold(f64::INFINITY, f64::min);
            if d1 > distinct && d2.is_finite() && d1 > 0.3 * d2 {
                return Err(ModelError::BranchTrackingFailed(w));
            }
        }
        history.push(
            assigned
                .iter()
                .map(|j| vals[j.expect("assigned")])
                .collect(),
        );
        if history.len() > 3 {
            history.remove(0);
        }
    }
    Ok(history.pop().expect("nonempty"))
}

fn least_squares_affine(ws: &[Vec<f64>], ys: &[f64]) -> Result<(f64, Vec<f64>, f64), ModelError> {
    let d = ws[0].len();
    let p = d + 1;
    let row =
        |w: &Vec<f64>| -> Vec<f64> { std::iter::once(1.0).chain(w.iter().copied()).collect() };
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    for (w, y) in ws.iter().zip(ys) {
        let r = row(w);
        for i in 0..p {
            aty[i] += r[i] * y;
            for j in 0..p {
                ata[i * p + j] += r[i] * r[j];
            }
        }
    }
    // the design may be rank deficient (d = 1 has two samples); solve through
    // the symmetric eigendecomposition with a pseudo-inverse cutoff
    let eig = symmetric_eigen(&ata, p)?;
    let lmax = eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut coef = vec![0.0; p];
    for (lam, v) in eig.values.iter().zip(&eig.vectors) {
        if lam.abs() <= 1e-12 * lmax {
            continue;
        }
        let proj: f64 = v.iter().zip(&aty).map(|(a, b)| a * b).sum::<f64>() / lam;
        for (c, vi) in coef.iter_mut().zip(v) {
            *c += proj * vi;
        }
    }
    let residual = ws
        .iter()
        .zip(ys)
        .map(|(w, y)| (row(w).iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>() - y).abs())
        .fold(0.0, f64::max);
    Ok((coef[0], coef[1..].to_vec(), residual))
}

/// Direction and its branch values, or the direction that could not be tracked.
type Tracked = Result<(Vec<f64>, Vec<f64>), Vec<f64>>;

/// Real, uniformly diagonalizable `A(w)` with affine eigenvalue branches.
pub fn check_condition_a(
    sys: &HyperbolicSystem,
    sphere: usize,
) -> Result<ConditionReport, ModelError> {
    let d = sys.dim();
    let samples = sphere_samples(d, sphere);
    let scale = sys.a().iter().map(|a| a.norm()).sum::<f64>().max(1.0);

    // spectrum reality and eigenvector conditioning at every sample
    let spectral: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|w| {
            let es = eigendecompose(&sys.a_of(w))?;
            let imag = es
                .eigenvalues
                .iter()
                .map(|z| z.im.abs())
                .fold(0.0, f64::max);
            Ok((imag, es.condition))
        })
        .collect::<Result<_, ModelError>>()?;
    let (imag_idx, max_imag) =
        spectral
            .iter()
            .map(|s| s.0)
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, v)| if v > best.1 { (i, v) } else { best },
            );
    let (cond_idx, max_condition) =
        spectral
            .iter()
            .map(|s| s.1)
            .enumerate()
            .fold((0, 0.0), |best, (i, v)| {
                if v > best.1 || v.is_infinite() && best.1.is_finite() {
                    (i, v)
                } else {
                    best
                }
            });

    // branch values at each sample, tracked from a common reference direction
    let mut notes = Vec::new();
    let mut skipped = Vec::new();
    let (ws, values): (Vec<Vec<f64>>, Vec<Vec<f64>>) = if d == 1 {
        let plus = sorted_real_eigs(sys, &[1.0])?;
        let minus = sorted_real_eigs(sys, &[-1.0])?;
        // A(-w) = -A(w): branch ℓ continues to the eigenvalue nearest -ν_ℓ(1)
        let mut used = vec![false; minus.len()];
        let paired: Vec<f64> = plus
            .iter()
            .map(|p| {
                let j = (0..minus.len())
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| (minus[a] + p).abs().total_cmp(&(minus[b] + p).abs()))
                    .expect("same size");
                used[j] = true;
                minus[j]
            })
            .collect();
        (vec![vec![1.0], vec![-1.0]], vec![plus, paired])
    } else {
        let mut reference = samples[0].clone();
        for (i, x) in reference.iter_mut().enumerate() {
            *x += 1e-3 * (1.0 + i as f64).sqrt().fract();
        }
        normalize(&mut reference);
        let start = sorted_real_eigs(sys, &reference)?;
        let tracked: Vec<Tracked> = samples
            .par_iter()
            .map(|w| {
                if let Ok(v) = track_branches(sys, &reference, w, &start, scale) {
                    return Ok((w.clone(), v));
                }
                let mut nudged: Vec<f64> = w
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x + CROSSING_NUDGE * (i as f64 + 1.0))
                    .collect();
                normalize(&mut nudged);
                track_branches(sys, &reference, &nudged, &start, scale)
                    .map(|v| (nudged.clone(), v))
                    .map_err(|_| w.clone())
            })
            .collect();
        let mut ws = Vec::new();
        let mut vals = Vec::new();
        for t in tracked {
            match t {
                Ok((w, v)) => {
                    ws.push(w);
                    vals.push(v);
                }
                Err(w) => skipped.push(w),
            }
        }
        if !skipped.is_empty() {
            notes.push(format!(
                "{} samples skipped after ambiguous branch tracking",
                skipped.len()
            ));
        }
        (ws, vals)
    };

    let mut branches = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut worst_branch_sample = None;
    if ws.is_empty() {
        notes.push("no samples could be tracked".into());
        max_residual = f64::INFINITY;
    } else {
        for l in 0..sys.size() {
            let ys: Vec<f64> = values.iter().map(|v| v[l]).collect();
            let (nu0, nu, residual) = least_squares_affine(&ws, &ys)?;
            if residual > max_residual {
                max_residual = residual;
                let fit = BranchFit {
                    nu0,
                    nu: nu.clone(),
                    residual,
                };
                let idx = ws
                    .iter()
                    .zip(&ys)
                    .map(|(w, y)| (fit.eval(w) - y).abs())
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(i, _)| i)
                    .expect("nonempty");
                worst_branch_sample = Some(ws[idx].clone());
            }
            branches.push(BranchFit { nu0, nu, residual });
        }
    }
    let real_ok = max_imag <= 1e-8 * scale;
    let cond_ok = max_condition <= CONDITION_CAP;
    let fit_ok = max_residual <= 1e-6;
    if !real_ok {
        notes.push(format!(
            "non-real eigenvalue of A(w), imaginary part {max_imag:e}"
        ));
    }
    if !cond_ok {
        notes.push(format!(
            "eigenvector condition number {max_condition:e} exceeds {CONDITION_CAP:e}"
        ));
    }
    if !fit_ok {
        notes.push(format!(
            "eigenvalue branches are not affine in w (residual {max_residual:e})"
        ));
    }
    let passed = real_ok && cond_ok && fit_ok;
    let worst_sample = if !real_ok {
        Some(samples[imag_idx].clone())
    } else if !cond_ok {
        Some(samples[cond_idx].clone())
    } else {
        worst_branch_sample.or_else(|| Some(samples[cond_idx].clone()))
    };
    Ok(ConditionReport {
        condition: ConditionTag::A,
        passed,
        certificate: Certificate::Hyperbolicity {
            branches,
            max_residual,
            max_imag,
            max_condition,
            skipped_samples: skipped,
        },
        worst_sample,
        notes,
    })
}

/// `R(w)⁻¹BR(w)` independent of `w`.
pub fn check_condition_r(
    sys: &HyperbolicSystem,
    sphere: usize,
) -> Result<ConditionReport, ModelError> {
    let diag = sys.diagonalizer().ok_or(ModelError::MissingDiagonalizer)?;
    let ws: Vec<Vec<f64>> = match diag {
        super::Diagonalizer::ClosedForm(_) => sphere_samples(sys.dim(), sphere),
        super::Diagonalizer::Sampled(s) => s.iter().map(|(w, _)| w.clone()).collect(),
    };
    if ws.is_empty() {
        return Err(ModelError::MissingDiagonalizer);
    }
    let ms: Vec<ComplexMatrix> = ws
        .par_iter()
        .map(|w| {
            let r = sys.r_at(w).ok_or(ModelError::MissingDiagonalizer)?;
            Ok(&(&inverse(&r)? * sys.b()) * &r)
        })
        .collect::<Result<_, ModelError>>()?;
    let reference = ms[0].clone();
    let (idx, max_deviation) =
        ms.iter()
            .map(|m| m.distance(&reference))
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, v)| if v > best.1 { (i, v) } else { best },
            );
    let passed = max_deviation <= 1e-8 * sys.b().norm();
    Ok(ConditionReport {
        condition: ConditionTag::R,
        passed,
        certificate: Certificate::ConstantDamping {
            reference,
            max_deviation,
        },
        worst_sample: Some(ws[idx].clone()),
        notes: Vec::new(),
    })
}

fn symmetry_residuals(sys: &HyperbolicSystem, s: &ComplexMatrix) -> (f64, f64) {
    let sn = s.norm();
    let comm = s.commutator_norm(sys.b()) / (sn * sys.b().norm()).max(f64::MIN_POSITIVE);
    let anti = sys
        .a()
        .iter()
        .map(|a| s.anticommutator_norm(a) / (sn * a.norm()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    (comm, anti)
}

fn singular_value_ratio(s: &[f64], n: usize) -> Result<f64, ModelError> {
    let mut sts = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            sts[i * n + j] = (0..n).map(|k| s[k * n + i] * s[k * n + j]).sum();
        }
    }
    let e = symmetric_eigen(&sts, n)?;
    let max = e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let min = e.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    Ok(if max == 0.0 { 0.0 } else { min / max })
}

/// Null space of `S ↦ (SB − BS, SAʲ + AʲS)` over real `S`, as row-major vectors.
fn symmetry_null_space(sys: &HyperbolicSystem) -> Result<Vec<Vec<f64>>, ModelError> {
    let n = sys.size();
    let nn = n * n;
    let mut blocks: Vec<(Vec<f64>, f64)> = vec![(sys.b().real_part(), -1.0)];
    for a in sys.a() {
        blocks.push((a.real_part(), 1.0));
    }
    // G = LᵀL accumulated block by block
    let mut g = vec![0.0; nn * nn];
    for (x, sign) in &blocks {
        for i in 0..n {
            for k in 0..n {
                // row for entry (i,k) of S·X + sign·X·S
                let mut row = vec![0.0; nn];
                for q in 0..n {
                    row[i * n + q] += x[q * n + k];
                }
                for p in 0..n {
                    row[p * n + k] += sign * x[i * n + p];
                }
                for a in 0..nn {
                    if row[a] == 0.0 {
                        continue;
                    }
                    for b in 0..nn {
                        g[a * nn + b] += row[a] * row[b];
                    }
                }
            }
        }
    }
    let e = symmetric_eigen(&g, nn)?;
    let lmax = e.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    Ok(e.values
        .iter()
        .zip(e.vectors)
        .filter(|(l, _)| lmax == 0.0 || l.abs() <= 1e-12 * lmax)
        .map(|(_, v)| v)
        .collect())
}

fn canonical_scale(s: &mut [f64], n: usize) {
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let trace: f64 = (0..n).map(|i| s[i * n + i]).sum();
    let sign = if trace.abs() > 1e-12 * norm {
        trace.signum()
    } else {
        s.iter()
            .find(|x| x.abs() > 1e-12 * norm)
            .map_or(1.0, |x| x.signum())
    };
    let f = sign * (n as f64).sqrt() / norm;
    for x in s {
        *x *= f;
    }
}

/// A constant invertible `S` with `SB = BS` and `SAʲ = −AʲS`, verified when
/// supplied and searched for otherwise.
pub fn check_condition_s(sys: &HyperbolicSystem) -> Result<ConditionReport, ModelError> {
    let n = sys.size();
    let null = symmetry_null_space(sys)?;
    let null_dimension = null.len();
    if let Some(s) = sys.symmetry() {
        let (comm, anti) = symmetry_residuals(sys, s);
        let invertible = singular_value_ratio(&s.real_part(), n)? >= 1e-12;
        let passed = comm <= 1e-10 && anti <= 1e-10 && invertible;
        let mut notes = Vec::new();
        if !invertible {
            notes.push("supplied S is singular".into());
        }
        return Ok(ConditionReport {
            condition: ConditionTag::S,
            passed,
            certificate: Certificate::Symmetry {
                s: Some(s.clone()),
                supplied: true,
                commutator_residual: comm,
                anticommutator_residual: anti,
                null_dimension,
            },
            worst_sample: (!passed).then(Vec::new),
            notes,
        });
    }
    let mut candidates: Vec<Vec<f64>> = null.clone();
    if null_dimension > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x53);
        for _ in 0..100 {
            let coeffs: Vec<f64> = (0..null_dimension)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let mut s = vec![0.0; n * n];
            for (c, v) in coeffs.iter().zip(&null) {
                for (si, vi) in s.iter_mut().zip(v) {
                    *si += c * vi;
                }
            }
            candidates.push(s);
        }
    }
    let mut found = None;
    for mut c in candidates {
        if singular_value_ratio(&c, n)? >= 1e-6 {
            canonical_scale(&mut c, n);
            found = Some(c);
            break;
        }
    }
    let mut notes = Vec::new();
    let (s, comm, anti) = match found {
        Some(v) => {
            let s = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j], 0.0));
            let (c, a) = symmetry_residuals(sys, &s);
            (Some(s), c, a)
        }
        None => {
            notes.push(if null_dimension == 0 {
                "no nonzero S commutes with B and anticommutes with every Aʲ".to_string()
            } else {
                format!("null space of dimension {null_dimension} has no invertible element in 100 draws")
            });
            (None, f64::NAN, f64::NAN)
        }
    };
    let passed = s.is_some();
    Ok(ConditionReport {
        condition: ConditionTag::S,
        passed,
        certificate: Certificate::Symmetry {
            s,
            supplied: false,
            commutator_residual: comm,
            anticommutator_residual: anti,
            null_dimension,
        },
        worst_sample: (!passed).then(Vec::new),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{damped_euler_2d, goldstein_kac_1d, goldstein_kac_3d, Diagonalizer};
    use super::*;

    /// Cosine similarity of two real matrices viewed as vectors.
    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    /// Whether a supplied `S` lies in the searched null space (up to scale).
    fn null_space_contains(sys: &HyperbolicSystem, s: &ComplexMatrix) -> Result<f64, ModelError> {
        let null = symmetry_null_space(sys)?;
        let v = s.real_part();
        // norm of the projection onto the orthonormal null-space basis
        let mut proj = vec![0.0; v.len()];
        for b in &null {
            let c: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
            for (p, bi) in proj.iter_mut().zip(b) {
                *p += c * bi;
            }
        }
        Ok(if null.is_empty() {
            0.0
        } else {
            cosine(&proj, &v)
        })
    }

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn condition_b_examples() {
        let r = check_condition_b(&damped_euler_2d()).unwrap();
        assert!(r.passed);
        let r = check_condition_b(&goldstein_kac_3d(0.5, 0.5, 0.5, None)).unwrap();
        assert!(r.passed);
        if let Certificate::SpectralSplit { sigma0, .. } = &r.certificate {
            assert!(sigma0.iter().all(|z| (z - 1.5).norm() < 1e-12));
        }
        let zero =
            HyperbolicSystem::new(vec![ComplexMatrix::identity(2)], ComplexMatrix::zeros(2, 2))
                .unwrap();
        let r = check_condition_b(&zero).unwrap();
        assert!(!r.passed && r.worst_sample.is_some());
    }

    #[test]
    fn condition_d_examples() {
        let opts = SamplingOptions::default();
        let r = check_condition_d(
            &goldstein_kac_1d(),
            opts.radial_samples,
            opts.sphere_samples,
        )
        .unwrap();
        assert!(r.passed, "{:?}", r);
        let r = check_condition_d(&damped_euler_2d(), opts.radial_samples, 128).unwrap();
        assert!(r.passed, "{:?}", r);
        let bad = HyperbolicSystem::new(
            vec![ComplexMatrix::identity(2)],
            goldstein_kac_1d().b().clone(),
        )
        .unwrap();
        let r = check_condition_d(&bad, opts.radial_samples, opts.sphere_samples).unwrap();
        assert!(!r.passed);
        assert!(r.notes[0].contains("purely imaginary"), "{:?}", r.notes);
    }

    #[test]
    fn condition_a_examples() {
        let r = check_condition_a(&goldstein_kac_3d(0.5, 0.5, 0.5, None), 256).unwrap();
        assert!(r.passed, "{:?}", r.notes);
        let r = check_condition_a(&damped_euler_2d(), 256).unwrap();
        assert!(r.passed, "{:?}", r.notes);
        if let Certificate::Hyperbolicity {
            max_residual,
            branches,
            ..
        } = &r.certificate
        {
            assert!(*max_residual <= 1e-8);
            let consts: Vec<f64> = branches.iter().map(|b| b.nu0).collect();
            assert!(
                (consts[0] + 1.0).abs() < 1e-8
                    && consts[1].abs() < 1e-8
                    && (consts[2] - 1.0).abs() < 1e-8
            );
        }
        let nil = HyperbolicSystem::new(
            vec![real(&[vec![0.0, 1.0], vec![0.0, 0.0]])],
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let r = check_condition_a(&nil, 16).unwrap();
        assert!(!r.passed && r.worst_sample.is_some());
    }

    #[test]
    fn condition_a_recovers_velocities() {
        let v = [[1.0, 0.3, -0.2], [-0.4, 1.0, 0.5], [-0.6, -1.3, -0.3]];
        let r = check_condition_a(&goldstein_kac_3d(0.5, 0.5, 0.5, Some(v)), 256).unwrap();
        let Certificate::Hyperbolicity { branches, .. } = &r.certificate else {
            panic!()
        };
        for species in v {
            assert!(branches.iter().any(|b| b.nu0.abs() < 1e-9
                && b.nu.iter().zip(&species).all(|(x, y)| (x - y).abs() < 1e-9)));
        }
    }

    #[test]
    fn condition_r_examples() {
        let r = check_condition_r(&damped_euler_2d(), 256).unwrap();
        assert!(r.passed, "{:?}", r.certificate);
        let r = check_condition_r(&goldstein_kac_3d(1.0, 0.5, 2.0, None), 64).unwrap();
        assert!(r.passed);
        let euler = damped_euler_2d();
        let samples: Vec<(Vec<f64>, ComplexMatrix)> = sphere_samples(2, 32)
            .into_iter()
            .map(|w| {
                let mut r = euler.r_at(&w).unwrap();
                if w[1] < 0.0 {
                    let c0: Vec<Complex64> = r.col(0).iter().map(|z| -z).collect();
                    r.set_col(0, &c0);
                }
                (w, r)
            })
            .collect();
        let bad = damped_euler_2d()
            .with_diagonalizer(Diagonalizer::Sampled(samples))
            .unwrap();
        let r = check_condition_r(&bad, 0).unwrap();
        let Certificate::ConstantDamping { max_deviation, .. } = r.certificate else {
            panic!()
        };
        assert!(!r.passed && max_deviation > 0.1 * bad.b().norm());
    }

    #[test]
    fn condition_s_search() {
        let euler = damped_euler_2d();
        let bare = HyperbolicSystem::new(euler.a().to_vec(), euler.b().clone()).unwrap();
        let r = check_condition_s(&bare).unwrap();
        let Certificate::Symmetry { s: Some(s), .. } = &r.certificate else {
            panic!("{:?}", r)
        };
        assert!(s.distance(&ComplexMatrix::from_real_diagonal(&[-1.0, 1.0, 1.0])) < 1e-10);

        let gk = goldstein_kac_1d();
        let bare = HyperbolicSystem::new(gk.a().to_vec(), gk.b().clone()).unwrap();
        let r = check_condition_s(&bare).unwrap();
        let Certificate::Symmetry { s: Some(s), .. } = &r.certificate else {
            panic!()
        };
        assert!(s.distance(&real(&[vec![0.0, 1.0], vec![1.0, 0.0]])) < 1e-10);

        let r = check_condition_s(&goldstein_kac_3d(0.5, 0.7, 1.1, None)).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn supplied_symmetry_is_in_searched_null_space() {
        for sys in [damped_euler_2d(), goldstein_kac_1d()] {
            let r = check_condition_s(&sys).unwrap();
            assert!(r.passed);
            let cos = null_space_contains(&sys, sys.symmetry().unwrap()).unwrap();
            assert!(cos >= 1.0 - 1e-8);
        }
    }
}
