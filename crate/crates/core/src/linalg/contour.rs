use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    cluster_tolerance, cluster_values, eigenvalues, solve_linear, ComplexMatrix, LinalgError,
};

pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 4096;
pub const QUADRATURE_TOLERANCE: f64 = 1e-11;

/// Positively oriented circle used for resolvent integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64, nodes: usize) -> Result<Self, LinalgError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LinalgError::InvalidContour(format!(
                "radius {radius} must be positive"
            )));
        }
        if nodes < 16 || !nodes.is_power_of_two() {
            return Err(LinalgError::InvalidContour(format!(
                "node count {nodes} must be a power of two and at least 16"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    pub fn circle(center: Complex64, radius: f64) -> Result<Self, LinalgError> {
        Self::new(center, radius, DEFAULT_NODES)
    }

    /// Circle around the eigenvalues `members` of `values`, centered at their
    /// mean. The radius sits halfway between the farthest member and the
    /// nearest excluded eigenvalue.
    pub fn around_members(values: &[Complex64], members: &[usize]) -> Result<Self, LinalgError> {
        if members.is_empty() {
            return Err(LinalgError::InvalidContour("empty eigenvalue group".into()));
        }
        let center = members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64;
        let spread = members
            .iter()
            .map(|&i| (values[i] - center).norm())
            .fold(0.0, f64::max);
        let gap = values
            .iter()
            .enumerate()
            .filter(|(i, _)| !members.contains(i))
            .map(|(_, v)| (v - center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = if gap.is_finite() {
            if gap <= spread {
                return Err(LinalgError::InvalidContour(
                    "group is not separated from the rest of the spectrum".into(),
                ));
            }
            0.5 * (spread + gap)
        } else {
            (2.0 * spread).max(1.0)
        };
        Self::circle(center, radius)
    }

    /// Circle around the eigenvalue cluster of `m` nearest to `target`.
    pub fn around_eigenvalue(m: &ComplexMatrix, target: Complex64) -> Result<Self, LinalgError> {
        let vals = eigenvalues(m)?;
        let clusters = cluster_values(&vals, cluster_tolerance(m));
        let nearest = (0..vals.len())
            .min_by(|&a, &b| {
                (vals[a] - target)
                    .norm()
                    .total_cmp(&(vals[b] - target).norm())
            })
            .ok_or_else(|| LinalgError::InvalidContour("empty matrix".into()))?;
        let cluster = clusters
            .into_iter()
            .find(|c| c.members.contains(&nearest))
            .expect("every eigenvalue belongs to a cluster");
        Self::around_members(&vals, &cluster.members)
    }

    pub fn encloses(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Fails when any of `values` lies within `radius·1e-6` of the circle.
    pub fn check_clear(&self, values: &[Complex64]) -> Result<(), LinalgError> {
        for &v in values {
            let d = ((v - self.center).norm() - self.radius).abs();
            if d <= self.radius * 1e-6 {
                return Err(LinalgError::ContourTouchesSpectrum {
                    eigenvalue: v,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    fn point(&self, j: usize, nodes: usize) -> (Complex64, Complex64) {
        let theta = 2.0 * PI * j as f64 / nodes as f64;
        let e = Complex64::from_polar(1.0, theta);
        (self.center + e * self.radius, e)
    }
}

/// `(1/2πi)∮ f(z) dz` by the trapezoid rule, doubling the node count from
/// `contour.nodes` until successive estimates agree to `1e-11·max(1,‖I‖)`.
pub fn contour_quadrature<F>(contour: &Contour, mut f: F) -> Result<ComplexMatrix, LinalgError>
where
    F: FnMut(Complex64) -> Result<ComplexMatrix, LinalgError>,
{
    let mut nodes = contour.nodes;
    let mut sum: Option<ComplexMatrix> = None;
    for j in 0..nodes {
        let (z, e) = contour.point(j, nodes);
        let term = f(z)?.scale(e);
        match sum.as_mut() {
            Some(s) => *s += &term,
            None => sum = Some(term),
        }
    }
    let mut sum = sum.expect("at least 16 nodes");
    let mut estimate = sum.scale_real(contour.radius / nodes as f64);
    let mut change = f64::INFINITY;
    while nodes < MAX_NODES {
        let doubled = nodes * 2;
        for j in (1..doubled).step_by(2) {
            let (z, e) = contour.point(j, doubled);
            sum += &f(z)?.scale(e);
        }
        nodes = doubled;
        let next = sum.scale_real(contour.radius / nodes as f64);
        change = next.distance(&estimate);
        estimate = next;
        if change < QUADRATURE_TOLERANCE * estimate.norm().max(1.0) {
            return Ok(estimate);
        }
    }
    Err(LinalgError::QuadratureNotConverged { nodes, change })
}

fn resolvent(m: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix, LinalgError> {
    solve_linear(&m.shift(-z), &ComplexMatrix::identity(m.rows()))
}

/// Riesz projection `-(1/2πi)∮(M − z)⁻¹dz` onto the eigenvalues inside `contour`.
pub fn contour_projection(
    m: &ComplexMatrix,
    contour: &Contour,
) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    contour.check_clear(&eigenvalues(m)?)?;
    Ok(-&contour_quadrature(contour, |z| resolvent(m, z))?)
}

/// Reduced resolvent `(1/2πi)∮(z − λ)⁻¹(M − z)⁻¹dz` at the enclosed eigenvalue `λ`.
pub fn reduced_resolvent(
    m: &ComplexMatrix,
    lambda: Complex64,
    contour: &Contour,
) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    if !contour.encloses(lambda) {
        return Err(LinalgError::InvalidContour(format!(
            "{lambda} is not inside the contour"
        )));
    }
    contour.check_clear(&eigenvalues(m)?)?;
    contour_quadrature(contour, |z| Ok(resolvent(m, z)?.scale((z - lambda).inv())))
}
