//! Analytic perturbation of eigenvalue groups for families `T(z) = T0 + zT1 + z²T2 + …`.

mod partition;

pub use partition::{partition_derivative, set_partitions, Polynomial, MAX_PARTITION_ORDER};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    cluster_tolerance, cluster_values, contour_projection, contour_quadrature, eigenvalues,
    reduced_resolvent, solve_linear, ComplexMatrix, Contour, LinalgError,
};

pub const DEFAULT_SERIES_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{value} is not an eigenvalue of T0 (nearest at distance {distance:e})")]
    NotAnEigenvalue { value: Complex64, distance: f64 },
    #[error("eigenvalue has multiplicity {multiplicity}, expected a simple eigenvalue")]
    NotSimple { multiplicity: usize },
    #[error("eigenvalue is not semi-simple (eigennilpotent norm {nilpotent_norm:e})")]
    NotSemisimple { nilpotent_norm: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("operation requires a linear pencil T0 + zT1")]
    NotLinearPencil,
    #[error("family members must be square matrices of equal size")]
    ShapeMismatch,
}

/// Coefficients `T0, T1, T2, …` of an analytic operator family.
#[derive(Debug, Clone)]
pub struct PerturbationFamily {
    pub t0: ComplexMatrix,
    pub t1: ComplexMatrix,
    pub higher: Vec<ComplexMatrix>,
}

impl PerturbationFamily {
    pub fn new(
        t0: ComplexMatrix,
        t1: ComplexMatrix,
        higher: Vec<ComplexMatrix>,
    ) -> Result<Self, PerturbationError> {
        let n = t0.rows();
        let ok = |m: &ComplexMatrix| m.rows() == n && m.cols() == n;
        if !ok(&t0) || !ok(&t1) || !higher.iter().all(ok) {
            return Err(PerturbationError::ShapeMismatch);
        }
        Ok(Self { t0, t1, higher })
    }

    pub fn pencil(t0: ComplexMatrix, t1: ComplexMatrix) -> Result<Self, PerturbationError> {
        Self::new(t0, t1, Vec::new())
    }

    pub fn size(&self) -> usize {
        self.t0.rows()
    }

    /// Coefficient `T^(j)`, zero beyond the stored terms.
    pub fn coefficient(&self, j: usize) -> ComplexMatrix {
        match j {
            0 => self.t0.clone(),
            1 => self.t1.clone(),
            _ => self
                .higher
                .get(j - 2)
                .cloned()
                .unwrap_or_else(|| ComplexMatrix::zeros(self.size(), self.size())),
        }
    }

    pub fn eval(&self, z: Complex64) -> ComplexMatrix {
        let mut out = self.t0.clone();
        let mut zp = z;
        out += &self.t1.scale(zp);
        for t in &self.higher {
            zp *= z;
            out += &t.scale(zp);
        }
        out
    }
}

/// Series data of the λ0-group of a perturbed family.
#[derive(Debug, Clone, Serialize)]
pub struct GroupExpansion {
    pub base_eigenvalue: Complex64,
    pub multiplicity: usize,
    /// `λ^(1), λ^(2), …`; for groups with `m > 1` these are weighted-mean coefficients.
    pub lambda_coeffs: Vec<Complex64>,
    /// `P^(0), P^(1), P^(2), …`.
    pub projection_coeffs: Vec<ComplexMatrix>,
    pub nilpotent: ComplexMatrix,
    pub reduced_resolvent: ComplexMatrix,
    /// `X^(i)` for `i = -(m-1) ..= 2m`, stored from the lowest index.
    pub x_chain: Vec<ComplexMatrix>,
    pub contour: Contour,
}

impl GroupExpansion {
    pub fn x_min(&self) -> i64 {
        -(self.multiplicity as i64 - 1)
    }

    /// `X^(i)`: `-P` at 0, `Q^i` above, `-N^|i|` below; zero outside the stored range.
    pub fn x(&self, i: i64) -> ComplexMatrix {
        let idx = i - self.x_min();
        if idx < 0 || idx as usize >= self.x_chain.len() {
            let n = self.nilpotent.rows();
            return ComplexMatrix::zeros(n, n);
        }
        self.x_chain[idx as usize].clone()
    }

    pub fn p0(&self) -> &ComplexMatrix {
        &self.projection_coeffs[0]
    }

    /// `P^(0) + zP^(1) + z²P^(2) + …` truncated after `terms` coefficients.
    pub fn projection_at(&self, z: Complex64, terms: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.p0().rows(), self.p0().cols());
        let mut zp = Complex64::new(1.0, 0.0);
        for p in self.projection_coeffs.iter().take(terms) {
            out += &p.scale(zp);
            zp *= z;
        }
        out
    }

    /// `λ0 + Σ_{j≤terms} z^j λ^(j)`.
    pub fn eigenvalue_at(&self, z: Complex64, terms: usize) -> Complex64 {
        let mut out = self.base_eigenvalue;
        let mut zp = Complex64::new(1.0, 0.0);
        for c in self.lambda_coeffs.iter().take(terms) {
            zp *= z;
            out += c * zp;
        }
        out
    }
}

/// Splitting of a semi-simple group by the compressed first-order term.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedGroup {
    pub sub_eigenvalues: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub sub_projections: Vec<ComplexMatrix>,
    pub sub_nilpotents: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryCheck {
    pub passed: bool,
    /// `(j, |λ^(j)|)` for odd `j`.
    pub residuals: Vec<(usize, f64)>,
    pub threshold: f64,
}

struct BaseGroup {
    contour: Contour,
    p: ComplexMatrix,
    q: ComplexMatrix,
    n: ComplexMatrix,
    m: usize,
}

fn base_group(t0: &ComplexMatrix, lambda0: Complex64) -> Result<BaseGroup, PerturbationError> {
    let vals = eigenvalues(t0)?;
    let tol = cluster_tolerance(t0);
    let (nearest, distance) = vals
        .iter()
        .enumerate()
        .map(|(i, v)| (i, (v - lambda0).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(PerturbationError::ShapeMismatch)?;
    if distance > tol {
        return Err(PerturbationError::NotAnEigenvalue {
            value: lambda0,
            distance,
        });
    }
    let cluster = cluster_values(&vals, tol)
        .into_iter()
        .find(|c| c.members.contains(&nearest))
        .expect("eigenvalue is in some cluster");
    let mut contour = Contour::around_members(&vals, &cluster.members)?;
    // keep the requested value as center so the reduced resolvent is taken at λ0
    contour.center = lambda0;
    let p = contour_projection(t0, &contour)?;
    let q = reduced_resolvent(t0, lambda0, &contour)?;
    let n = &t0.shift(-lambda0) * &p;
    Ok(BaseGroup {
        contour,
        p,
        q,
        n,
        m: cluster.multiplicity,
    })
}

fn x_chain(g: &BaseGroup) -> Vec<ComplexMatrix> {
    let m = g.m as i64;
    (-(m - 1)..=2 * m)
        .map(|i| match i {
            0 => -&g.p,
            i if i > 0 => g.q.powi(i as usize),
            i => -&g.n.powi((-i) as usize),
        })
        .collect()
}

/// All integer tuples of length `len` with entries `≥ lo` summing to `total`.
fn compositions(len: usize, total: i64, lo: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let hi = total - lo * (len as i64 - 1);
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in compositions(len - 1, total - first, lo) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Total-projection coefficients `P^(0..=2)` of the λ0-group from the `X`-chain,
/// together with weighted-mean eigenvalue coefficients `λ̂^(1), λ̂^(2)`.
pub fn total_projection_series(
    f: &PerturbationFamily,
    lambda0: Complex64,
) -> Result<GroupExpansion, PerturbationError> {
    let g = base_group(&f.t0, lambda0)?;
    let chain = x_chain(&g);
    let lo = -(g.m as i64 - 1);
    let x = |i: i64| -> &ComplexMatrix { &chain[(i - lo) as usize] };
    let t1 = &f.t1;
    let t2 = f.coefficient(2);
    let n = f.size();

    let mut p1 = ComplexMatrix::zeros(n, n);
    for k in compositions(2, 1, lo) {
        p1 += &(&(x(k[0]) * t1) * x(k[1]));
    }
    let mut p2 = ComplexMatrix::zeros(n, n);
    for k in compositions(2, 1, lo) {
        p2 += &(&(x(k[0]) * &t2) * x(k[1]));
    }
    for k in compositions(3, 2, lo) {
        p2 -= &(&(&(&(x(k[0]) * t1) * x(k[1])) * t1) * x(k[2]));
    }

    let m = g.m as f64;
    let l1 = (t1 * &g.p).trace() / m;
    let mut l2 = (&t2 * &g.p).trace();
    for k in compositions(2, 1, lo) {
        l2 += (&(&(t1 * x(k[0])) * t1) * x(k[1])).trace() * 0.5;
    }
    let l2 = l2 / m;

    Ok(GroupExpansion {
        base_eigenvalue: lambda0,
        multiplicity: g.m,
        lambda_coeffs: vec![l1, l2],
        projection_coeffs: vec![g.p.clone(), p1, p2],
        nilpotent: g.n.clone(),
        reduced_resolvent: g.q.clone(),
        x_chain: chain,
        contour: g.contour,
    })
}

fn hstack(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks[0].rows();
    let widths: Vec<usize> = blocks.iter().map(|b| b.cols()).collect();
    let total: usize = widths.iter().sum();
    let mut out = ComplexMatrix::zeros(rows, total);
    let mut off = 0;
    for b in blocks {
        for i in 0..rows {
            for j in 0..b.cols() {
                out[(i, off + j)] = b[(i, j)];
            }
        }
        off += b.cols();
    }
    out
}

fn block(m: &ComplexMatrix, index: usize, width: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), width, |i, j| m[(i, index * width + j)])
}

/// Eigenvalue coefficients `λ^(j) = tr(T1·P^(j-1))/j`, `j = 1..=order`, of a
/// simple eigenvalue of a linear pencil, with `P^(j)` from the resolvent
/// expansion `P^(j) = -(-1)^j (1/2πi)∮R(T1R)^j dζ`.
pub fn simple_eigenvalue_series(
    f: &PerturbationFamily,
    lambda0: Complex64,
    order: usize,
) -> Result<GroupExpansion, PerturbationError> {
    if !f.higher.iter().all(|t| t.norm() == 0.0) {
        return Err(PerturbationError::NotLinearPencil);
    }
    let g = base_group(&f.t0, lambda0)?;
    if g.m != 1 {
        return Err(PerturbationError::NotSimple { multiplicity: g.m });
    }
    let n = f.size();
    let terms = order.max(3);
    let t0 = &f.t0;
    let t1 = &f.t1;
    let stacked = contour_quadrature(&g.contour, |zeta| {
        let r = solve_linear(&t0.shift(-zeta), &ComplexMatrix::identity(n))?;
        let t1r = t1 * &r;
        let mut blocks = Vec::with_capacity(terms);
        let mut cur = r.clone();
        for _ in 0..terms {
            blocks.push(cur.clone());
            cur = &cur * &t1r;
        }
        Ok(hstack(&blocks))
    })?;
    let projections: Vec<ComplexMatrix> = (0..terms)
        .map(|j| {
            let b = block(&stacked, j, n);
            if j % 2 == 0 {
                -&b
            } else {
                b
            }
        })
        .collect();
    let lambda_coeffs = (1..=order)
        .map(|j| (t1 * &projections[j - 1]).trace() / j as f64)
        .collect();
    Ok(GroupExpansion {
        base_eigenvalue: lambda0,
        multiplicity: 1,
        lambda_coeffs,
        projection_coeffs: projections,
        nilpotent: ComplexMatrix::zeros(n, n),
        reduced_resolvent: g.q.clone(),
        x_chain: x_chain(&g),
        contour: g.contour,
    })
}

/// Weighted-mean coefficients `(λ̂^(1), λ̂^(2))` of the λ0-group.
pub fn weighted_mean_series(
    f: &PerturbationFamily,
    lambda0: Complex64,
) -> Result<(Complex64, Complex64), PerturbationError> {
    let e = total_projection_series(f, lambda0)?;
    Ok((e.lambda_coeffs[0], e.lambda_coeffs[1]))
}

fn orthonormal_range(p: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let n = p.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..p.cols()).map(|j| p.col(j)).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (best, _) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let mut v = cols.swap_remove(best);
        for _ in 0..2 {
            for b in &basis {
                let dot: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= nv;
        }
        for c in &mut cols {
            let dot: Complex64 = v.iter().zip(c.iter()).map(|(x, y)| x.conj() * y).sum();
            for (ci, vi) in c.iter_mut().zip(&v) {
                *ci -= dot * vi;
            }
        }
        basis.push(v);
    }
    ComplexMatrix::from_fn(n, rank, |i, j| basis[j][i])
}

/// Splits a semi-simple λ0-group by the eigenvalues of `P0·T1·P0` on `ran P0`.
pub fn reduce_semisimple_group(
    f: &PerturbationFamily,
    lambda0: Complex64,
) -> Result<ReducedGroup, PerturbationError> {
    let g = base_group(&f.t0, lambda0)?;
    let nn = g.n.norm();
    if nn > 1e-8 * (1.0 + f.t0.norm()) {
        return Err(PerturbationError::NotSemisimple { nilpotent_norm: nn });
    }
    let compressed = &(&g.p * &f.t1) * &g.p;
    let u = orthonormal_range(&g.p, g.m);
    let uh = u.adjoint();
    let k = &(&uh * &compressed) * &u;
    let vals = eigenvalues(&k)?;
    let clusters = cluster_values(&vals, cluster_tolerance(&k));
    let lift = &u;
    let right = &uh * &g.p;
    let mut out = ReducedGroup {
        sub_eigenvalues: Vec::new(),
        multiplicities: Vec::new(),
        sub_projections: Vec::new(),
        sub_nilpotents: Vec::new(),
    };
    let single = clusters.len() == 1;
    for c in clusters {
        let pj = if single {
            right.clone()
        } else {
            let contour = Contour::around_members(&vals, &c.members)?;
            &contour_projection(&k, &contour)? * &right
        };
        let pj = lift * &pj;
        let nj = &compressed.shift(-c.center) * &pj;
        out.sub_eigenvalues.push(c.center);
        out.multiplicities.push(c.multiplicity);
        out.sub_projections.push(pj);
        out.sub_nilpotents.push(nj);
    }
    Ok(out)
}

/// Checks that odd eigenvalue coefficients vanish when `S` commutes with `T0`
/// and anticommutes with `T1`.
pub fn symmetry_vanishing_check(
    f: &PerturbationFamily,
    s: &ComplexMatrix,
    lambda0: Complex64,
    order: usize,
) -> Result<SymmetryCheck, PerturbationError> {
    let sn = s.norm();
    let comm = s.commutator_norm(&f.t0);
    if comm > 1e-10 * f.t0.norm() * sn {
        return Err(PerturbationError::PreconditionViolated(format!(
            "S does not commute with T0 (residual {comm:e})"
        )));
    }
    let anti = s.anticommutator_norm(&f.t1);
    if anti > 1e-10 * f.t1.norm() * sn {
        return Err(PerturbationError::PreconditionViolated(format!(
            "S does not anticommute with T1 (residual {anti:e})"
        )));
    }
    if crate::linalg::inverse(s).is_err() {
        return Err(PerturbationError::PreconditionViolated(
            "S is singular".into(),
        ));
    }
    let e = simple_eigenvalue_series(f, lambda0, order)?;
    let scale = 1.0 + f.t0.norm() + f.t1.norm();
    let threshold = 1e-9 * scale;
    let residuals: Vec<(usize, f64)> = (1..=order)
        .step_by(2)
        .map(|j| (j, e.lambda_coeffs[j - 1].norm()))
        .collect();
    Ok(SymmetryCheck {
        passed: residuals.iter().all(|r| r.1 <= threshold),
        residuals,
        threshold,
    })
}

/// Eigenvalues of `T(z)` belonging to the λ0-group, found by following every
/// eigenvalue of `T0` along `s·z`, `s ∈ [0,1]`, with nearest matching.
pub fn group_eigenvalues_at(
    f: &PerturbationFamily,
    lambda0: Complex64,
    z: Complex64,
    steps: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>), PerturbationError> {
    let base = eigenvalues(&f.t0)?;
    let tol = cluster_tolerance(&f.t0);
    let mut labels: Vec<bool> = base.iter().map(|v| (v - lambda0).norm() <= tol).collect();
    if !labels.iter().any(|&b| b) {
        let distance = base
            .iter()
            .map(|v| (v - lambda0).norm())
            .fold(f64::INFINITY, f64::min);
        return Err(PerturbationError::NotAnEigenvalue {
            value: lambda0,
            distance,
        });
    }
    let mut current = base;
    let steps = steps.max(1);
    for s in 1..=steps {
        let zs = z * (s as f64 / steps as f64);
        let next = eigenvalues(&f.eval(zs))?;
        let mut used = vec![false; next.len()];
        let mut new_order = vec![Complex64::new(0.0, 0.0); next.len()];
        // greedy matching by increasing distance
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        for (i, a) in current.iter().enumerate() {
            for (j, b) in next.iter().enumerate() {
                pairs.push((i, j, (a - b).norm()));
            }
        }
        pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
        let mut assigned = vec![false; current.len()];
        for (i, j, _) in pairs {
            if !assigned[i] && !used[j] {
                assigned[i] = true;
                used[j] = true;
                new_order[i] = next[j];
            }
        }
        current = new_order;
    }
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for (v, l) in current.into_iter().zip(labels.iter_mut()) {
        if *l {
            inside.push(v);
        } else {
            outside.push(v);
        }
    }
    Ok((inside, outside))
}

/// Total projection of the λ0-group of `T(z)` by direct contour integration.
pub fn group_projection_at(
    f: &PerturbationFamily,
    lambda0: Complex64,
    z: Complex64,
) -> Result<ComplexMatrix, PerturbationError> {
    let (inside, outside) = group_eigenvalues_at(f, lambda0, z, 32)?;
    let all: Vec<Complex64> = inside.iter().chain(&outside).copied().collect();
    let members: Vec<usize> = (0..inside.len()).collect();
    let contour = Contour::around_members(&all, &members)?;
    Ok(contour_projection(&f.eval(z), &contour)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn gk2() -> PerturbationFamily {
        let b = real(&[vec![0.5, -0.5], vec![-0.5, 0.5]]);
        let a = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]);
        PerturbationFamily::pencil(b, a.scale(Complex64::i())).unwrap()
    }

    #[test]
    fn unperturbed_family() {
        let f = PerturbationFamily::pencil(
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]),
            ComplexMatrix::zeros(3, 3),
        )
        .unwrap();
        let e = total_projection_series(&f, c(0.0)).unwrap();
        assert!(
            e.p0()
                .distance(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]))
                < 1e-12
        );
        assert!(e.projection_coeffs[1].norm() < 1e-14);
        assert!(e.projection_coeffs[2].norm() < 1e-14);
    }

    #[test]
    fn first_order_projection_matches_hand_product() {
        let f = gk2();
        let e = total_projection_series(&f, c(0.0)).unwrap();
        let p = real(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let q = real(&[vec![0.5, -0.5], vec![-0.5, 0.5]]);
        let expected = -&(&(&(&p * &f.t1) * &q) + &(&(&q * &f.t1) * &p));
        assert!(e.projection_coeffs[1].distance(&expected) < 1e-10);
        assert!(e.p0().distance(&p) < 1e-12);
        assert!(e.reduced_resolvent.distance(&q) < 1e-12);
        let p0 = e.p0();
        let p1 = &e.projection_coeffs[1];
        assert!((&(p0 * p1) + &(p1 * p0)).distance(p1) < 1e-8);
    }

    #[test]
    fn decoupled_diagonal_series() {
        let f = PerturbationFamily::pencil(
            ComplexMatrix::from_real_diagonal(&[0.0, 5.0]),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
        )
        .unwrap();
        let e = simple_eigenvalue_series(&f, c(0.0), 4).unwrap();
        assert!((e.lambda_coeffs[0] - 1.0).norm() < 1e-12);
        for l in &e.lambda_coeffs[1..] {
            assert!(l.norm() < 1e-12);
        }
    }

    #[test]
    fn goldstein_kac_dispersion_coefficients() {
        // λ0(ik) = 1/2 - sqrt(1/4 - k²) = k² + k⁴ + …, with z = k
        let e = simple_eigenvalue_series(&gk2(), c(0.0), 4).unwrap();
        let expected = [0.0, 1.0, 0.0, 1.0];
        for (l, x) in e.lambda_coeffs.iter().zip(expected) {
            assert!((l - x).norm() < 1e-9, "{l} vs {x}");
        }
    }

    #[test]
    fn weighted_mean_reduces_for_simple_group() {
        let f = gk2();
        let (l1, l2) = weighted_mean_series(&f, c(0.0)).unwrap();
        let s = simple_eigenvalue_series(&f, c(0.0), 2).unwrap();
        assert!((l1 - s.lambda_coeffs[0]).norm() < 1e-10);
        assert!((l2 - s.lambda_coeffs[1]).norm() < 1e-10);
    }

    #[test]
    fn weighted_mean_double_eigenvalue() {
        let t1 = real(&[
            vec![0.3, 1.0, -2.0],
            vec![0.5, -0.7, 0.1],
            vec![2.0, 0.4, 1.1],
        ]);
        let f = PerturbationFamily::pencil(
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]),
            t1.clone(),
        )
        .unwrap();
        let (l1, _) = weighted_mean_series(&f, c(1.0)).unwrap();
        assert!((l1 - 0.5 * (t1[(0, 0)] + t1[(1, 1)])).norm() < 1e-12);
    }

    #[test]
    fn reduction_of_zero_base() {
        let f = PerturbationFamily::pencil(
            ComplexMatrix::zeros(3, 3),
            ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 2.0]),
        )
        .unwrap();
        let r = reduce_semisimple_group(&f, c(0.0)).unwrap();
        assert_eq!(r.multiplicities, vec![1, 2]);
        assert!((r.sub_eigenvalues[0] - 1.0).norm() < 1e-12);
        assert!((r.sub_eigenvalues[1] - 2.0).norm() < 1e-12);
        let sum = &r.sub_projections[0] + &r.sub_projections[1];
        assert!(sum.distance(&ComplexMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn reduction_rejects_jordan_block() {
        let f = PerturbationFamily::pencil(
            real(&[vec![0.0, 1.0], vec![0.0, 0.0]]),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        assert!(matches!(
            reduce_semisimple_group(&f, c(0.0)),
            Err(PerturbationError::NotSemisimple { .. }) | Err(PerturbationError::Linalg(_))
        ));
    }

    #[test]
    fn symmetry_for_goldstein_kac() {
        let s = real(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let r = symmetry_vanishing_check(&gk2(), &s, c(0.0), 4).unwrap();
        assert!(r.passed, "{:?}", r.residuals);
        assert_eq!(r.residuals.len(), 2);
    }

    #[test]
    fn symmetry_check_without_symmetry() {
        // drift: T1 = i·diag(1, 2) has tr(T1 P0) ≠ 0 and no anticommuting S
        let f = PerturbationFamily::pencil(
            gk2().t0,
            ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).scale(Complex64::i()),
        )
        .unwrap();
        let s = real(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            symmetry_vanishing_check(&f, &s, c(0.0), 3),
            Err(PerturbationError::PreconditionViolated(_))
        ));
        let e = simple_eigenvalue_series(&f, c(0.0), 1).unwrap();
        assert!(e.lambda_coeffs[0].norm() > 0.1);
    }

    #[test]
    fn not_an_eigenvalue() {
        assert!(matches!(
            total_projection_series(&gk2(), c(0.3)),
            Err(PerturbationError::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(2, 1, 0), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(compositions(3, 2, -1).len(), 21);
    }
}
