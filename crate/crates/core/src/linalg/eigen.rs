//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR iteration to a complex Schur form, and eigenvectors by
//! back-substitution on the triangular factor.

use num_complex::Complex64;

use super::{inverse, ComplexMatrix, LinalgError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Clustering tolerance for eigenvalue multiplicities, `1e-8·(1+‖M‖)`.
pub fn cluster_tolerance(m: &ComplexMatrix) -> f64 {
    1e-8 * (1.0 + m.norm())
}

/// Eigenvalues sorted by (real, imaginary) part with unit-norm right eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub vectors: ComplexMatrix,
    /// `‖V‖·‖V⁻¹‖` in the Frobenius norm; infinite when `V` is numerically singular.
    pub condition: f64,
}

/// A group of eigenvalues closer than the clustering tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

impl EigenSystem {
    /// Single-linkage clusters of the eigenvalues, ordered by their first member.
    pub fn clusters(&self, tol: f64) -> Vec<Cluster> {
        cluster_values(&self.eigenvalues, tol)
    }

    /// The cluster containing the eigenvalue closest to `target`, if that
    /// eigenvalue lies within `tol` of it.
    pub fn cluster_near(&self, target: Complex64, tol: f64) -> Option<Cluster> {
        let clusters = self.clusters(tol);
        let nearest = self
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))?;
        if (nearest.1 - target).norm() > tol {
            return None;
        }
        clusters
            .into_iter()
            .find(|c| c.members.contains(&nearest.0))
    }
}

pub fn cluster_values(values: &[Complex64], tol: f64) -> Vec<Cluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(ci) => clusters[ci].members.push(i),
            None => {
                root_of[r] = Some(clusters.len());
                clusters.push(Cluster {
                    center: ZERO,
                    multiplicity: 0,
                    members: vec![i],
                });
            }
        }
    }
    for c in &mut clusters {
        c.multiplicity = c.members.len();
        c.center = c.members.iter().map(|&i| values[i]).sum::<Complex64>() / c.multiplicity as f64;
    }
    clusters
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Complex Schur factorization `M = Z·T·Zᴴ` with `T` upper triangular.
pub fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let (mut h, mut z) = hessenberg(m);
    if n < 2 {
        return Ok((h, z));
    }
    let eps = f64::EPSILON;
    let hnorm = h.norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].l1_norm() + h[(l, l)].l1_norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].l1_norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_ITER_PER_EIGENVALUE * n {
            return Err(LinalgError::ConvergenceFailure { iterations: total });
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)]
                + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.3 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let start = if k > l { k - 1 } else { k };
            for j in start..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = z[(i, k)];
                let b = z[(i, k + 1)];
                z[(i, k)] = a * c + b * s.conj();
                z[(i, k + 1)] = -a * s + b * c;
            }
        }
    }
    // clean strictly-lower part
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok((h, z))
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Rotation `[[c, s], [-s̄, c]]` with real `c` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let xn = x.norm();
    let norm = xn.hypot(y.norm());
    let c = xn / norm;
    let s = (x / xn) * y.conj() / norm;
    (c, s)
}

fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2vvᴴ) H on rows k+1..n
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        // H <- H (I - 2vvᴴ), Q <- Q (I - 2vvᴴ) on columns k+1..n
        for target in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = (0..v.len()).map(|j| target[(i, k + 1 + j)] * v[j]).sum();
                for j in 0..v.len() {
                    target[(i, k + 1 + j)] -= dot * v[j].conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Eigenvalues only, sorted by (real, imaginary) part.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let (t, _) = schur(m)?;
    let mut vals = t.diagonal();
    vals.sort_by(sort_key);
    Ok(vals)
}

/// Full eigendecomposition with sorted eigenvalues and unit right eigenvectors.
pub fn eigendecompose(m: &ComplexMatrix) -> Result<EigenSystem, LinalgError> {
    let (t, z) = schur(m)?;
    let n = t.rows();
    let small = (f64::EPSILON * t.norm()).max(f64::MIN_POSITIVE);
    let mut vecs = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mut x = vec![ZERO; n];
        x[k] = ONE;
        let lambda = t[(k, k)];
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * x[j]).sum();
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[i] = -s / denom;
        }
        let mut v = z.matvec(&x);
        let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut v {
            *c /= nv;
        }
        vecs.set_col(k, &v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag = t.diagonal();
    order.sort_by(|&a, &b| sort_key(&diag[a], &diag[b]));
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    let condition = match inverse(&vectors) {
        Ok(inv) => vectors.norm() * inv.norm(),
        Err(_) => f64::INFINITY,
    };
    Ok(EigenSystem {
        eigenvalues,
        vectors,
        condition,
    })
}
