use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use super::SpectralError;

/// `[-L, L)^d` sampled with `N` points per axis, `x_j = -L + j·2L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    pub d: usize,
    pub n: usize,
    pub half_width: f64,
}

impl PeriodicGrid {
    pub fn new(d: usize, n: usize, half_width: f64) -> Result<Self, SpectralError> {
        if d == 0 {
            return Err(SpectralError::InvalidGrid(
                "dimension must be positive".into(),
            ));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!(
                "N = {n} must be a power of two ≥ 8"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "half-width {half_width} must be positive"
            )));
        }
        if n.checked_pow(d as u32).is_none() {
            return Err(SpectralError::InvalidGrid("grid too large".into()));
        }
        Ok(Self { d, n, half_width })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn total(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Volume element `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for a in (0..self.d).rev() {
            idx[a] = p % self.n;
            p /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, p: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(p)
            .into_iter()
            .map(|j| -self.half_width + j as f64 * h)
            .collect()
    }

    /// Integer wave numbers `m ∈ {-N/2, …, N/2-1}` at FFT storage index `p`.
    pub fn wave_numbers(&self, p: usize) -> Vec<i64> {
        let n = self.n as i64;
        self.multi_index(p)
            .into_iter()
            .map(|j| {
                let j = j as i64;
                if j < n / 2 {
                    j
                } else {
                    j - n
                }
            })
            .collect()
    }

    /// `k = (π/L)·m`.
    pub fn frequency(&self, p: usize) -> Vec<f64> {
        let s = std::f64::consts::PI / self.half_width;
        self.wave_numbers(p)
            .into_iter()
            .map(|m| s * m as f64)
            .collect()
    }

    pub fn frequency_norm(&self, p: usize) -> f64 {
        self.frequency(p).iter().map(|k| k * k).sum::<f64>().sqrt()
    }

    /// Largest representable `|k|` along an axis.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.half_width * (self.n / 2) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Frequency,
}

/// `n` complex components on a grid, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: PeriodicGrid,
    pub components: usize,
    pub values: Vec<Complex64>,
    pub representation: Representation,
}

impl GridField {
    pub fn zeros(grid: PeriodicGrid, components: usize, representation: Representation) -> Self {
        Self {
            grid,
            components,
            values: vec![Complex64::new(0.0, 0.0); components * grid.total()],
            representation,
        }
    }

    pub fn from_values(
        grid: PeriodicGrid,
        components: usize,
        values: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self, SpectralError> {
        if values.len() != components * grid.total() {
            return Err(SpectralError::ShapeMismatch);
        }
        Ok(Self {
            grid,
            components,
            values,
            representation,
        })
    }

    /// Physical field with `f(x)` evaluated at every grid point.
    pub fn from_fn(
        grid: PeriodicGrid,
        components: usize,
        f: impl Fn(&[f64]) -> Vec<Complex64>,
    ) -> Self {
        let np = grid.total();
        let mut out = Self::zeros(grid, components, Representation::Physical);
        for p in 0..np {
            let v = f(&grid.point(p));
            for (c, z) in v.into_iter().enumerate().take(components) {
                out.values[c * np + p] = z;
            }
        }
        out
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let np = self.grid.total();
        &self.values[c * np..(c + 1) * np]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.grid.total();
        &mut self.values[c * np..(c + 1) * np]
    }

    /// Component vector at one grid point.
    pub fn at(&self, p: usize) -> Vec<Complex64> {
        let np = self.grid.total();
        (0..self.components)
            .map(|c| self.values[c * np + p])
            .collect()
    }

    pub fn set_at(&mut self, p: usize, v: &[Complex64]) {
        let np = self.grid.total();
        for (c, z) in v.iter().enumerate() {
            self.values[c * np + p] = *z;
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), SpectralError> {
        if self.grid != other.grid
            || self.components != other.components
            || self.representation != other.representation
        {
            return Err(SpectralError::ShapeMismatch);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.values
            .iter_mut()
            .zip(&other.values)
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Sum of `|v|²` over all entries; preserved by the unitary transform.
    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `L^p` norm of a physical field, pointwise Euclidean over components.
    /// `p = ∞` gives the maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64, SpectralError> {
        if self.representation != Representation::Physical {
            return Err(SpectralError::WrongRepresentation {
                expected: Representation::Physical,
                found: self.representation,
            });
        }
        let np = self.grid.total();
        let pointwise = (0..np).map(|q| {
            (0..self.components)
                .map(|c| self.values[c * np + q].norm_sqr())
                .sum::<f64>()
                .sqrt()
        });
        if p.is_infinite() {
            return Ok(pointwise.fold(0.0, f64::max));
        }
        let s: f64 = pointwise.map(|v| v.powf(p)).sum();
        Ok((s * self.grid.cell_volume()).powf(1.0 / p))
    }

    /// `max|Im| / max|·|` over all entries.
    pub fn imaginary_ratio(&self) -> f64 {
        let top = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / top
    }

    pub fn to_frequency(&self) -> Result<Self, SpectralError> {
        self.transform(
            Representation::Physical,
            Representation::Frequency,
            FftDirection::Forward,
        )
    }

    pub fn to_physical(&self) -> Result<Self, SpectralError> {
        self.transform(
            Representation::Frequency,
            Representation::Physical,
            FftDirection::Inverse,
        )
    }

    fn transform(
        &self,
        from: Representation,
        to: Representation,
        dir: FftDirection,
    ) -> Result<Self, SpectralError> {
        if self.representation != from {
            return Err(SpectralError::WrongRepresentation {
                expected: from,
                found: self.representation,
            });
        }
        let grid = self.grid;
        let fft = FftPlanner::new().plan_fft(grid.n, dir);
        let np = grid.total();
        let scale = 1.0 / (np as f64).sqrt();
        let mut out = self.clone();
        out.values.par_chunks_mut(np).for_each(|comp| {
            for axis in 0..grid.d {
                fft_axis(comp, &grid, axis, fft.as_ref());
            }
            comp.iter_mut().for_each(|v| *v *= scale);
        });
        out.representation = to;
        Ok(out)
    }
}

fn fft_axis(data: &mut [Complex64], grid: &PeriodicGrid, axis: usize, fft: &dyn Fft<f64>) {
    let n = grid.n;
    let stride = n.pow((grid.d - 1 - axis) as u32);
    if stride == 1 {
        fft.process(data);
        return;
    }
    let block = stride * n;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for start in (0..data.len()).step_by(block) {
        for off in 0..stride {
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[start + off + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[start + off + j * stride] = *v;
            }
        }
    }
}
