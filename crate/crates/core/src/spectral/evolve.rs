use num_complex::Complex64;
use rayon::prelude::*;

use super::{CutoffSpec, GridField, PeriodicGrid, Representation, SpectralError};
use crate::chapman_enskog::{exact_group_projection, ParabolicLimit};
use crate::linalg::{eigenvalues, matrix_exponential, ComplexMatrix};
use crate::model::{sphere_samples, HyperbolicSystem};

fn frequency_form(u: &GridField) -> Result<GridField, SpectralError> {
    match u.representation {
        Representation::Frequency => Ok(u.clone()),
        Representation::Physical => u.to_frequency(),
    }
}

fn restore(uhat: GridField, like: Representation) -> Result<GridField, SpectralError> {
    match like {
        Representation::Frequency => Ok(uhat),
        Representation::Physical => uhat.to_physical(),
    }
}

/// Applies `op(p)` to the component vector at every frequency in parallel.
fn apply_per_frequency<F>(uhat: &GridField, op: F) -> Result<GridField, SpectralError>
where
    F: Fn(usize, &[Complex64]) -> Result<Vec<Complex64>, SpectralError> + Sync,
{
    let np = uhat.grid.total();
    let updated: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|p| op(p, &uhat.at(p)))
        .collect::<Result<_, _>>()?;
    let mut out = uhat.clone();
    for (p, v) in updated.iter().enumerate() {
        out.set_at(p, v);
    }
    Ok(out)
}

fn propagator(sys: &HyperbolicSystem, k: &[f64], t: f64) -> Result<ComplexMatrix, SpectralError> {
    let e = sys.symbol(k).e;
    Ok(matrix_exponential(&e.scale_real(-t))?)
}

/// `û(k,t) = exp(-E(ik)t)·û₀(k)`; the output keeps the input representation.
pub fn evolve_hyperbolic(
    sys: &HyperbolicSystem,
    u0: &GridField,
    t: f64,
) -> Result<GridField, SpectralError> {
    assert!(t >= 0.0, "evolution time must be non-negative");
    let uhat = frequency_form(u0)?;
    if t == 0.0 {
        return restore(uhat, u0.representation);
    }
    let grid = uhat.grid;
    let out = apply_per_frequency(&uhat, |p, v| {
        Ok(propagator(sys, &grid.frequency(p), t)?.matvec(v))
    })?;
    restore(out, u0.representation)
}

/// `P₀(ik)·χ₁(|k|)` cached on the frequencies inside the inner cutoff.
pub struct SplitEvolver<'a> {
    sys: &'a HyperbolicSystem,
    grid: PeriodicGrid,
    cut: CutoffSpec,
    weighted: Vec<(usize, ComplexMatrix)>,
}

impl<'a> SplitEvolver<'a> {
    pub fn new(
        sys: &'a HyperbolicSystem,
        grid: PeriodicGrid,
        cut: CutoffSpec,
        p0: &ComplexMatrix,
    ) -> Result<Self, SpectralError> {
        let inside: Vec<usize> = (0..grid.total())
            .filter(|&p| grid.frequency_norm(p) < cut.eps)
            .collect();
        let weighted = inside
            .into_par_iter()
            .map(|p| {
                let k = grid.frequency(p);
                let s = grid.frequency_norm(p);
                let proj = if s == 0.0 {
                    p0.clone()
                } else {
                    exact_group_projection(sys, &k)?
                };
                Ok((p, proj.scale_real(cut.chi1(s))))
            })
            .collect::<Result<Vec<_>, SpectralError>>()?;
        log::debug!("split evolver: {} cached projections", weighted.len());
        Ok(Self {
            sys,
            grid,
            cut,
            weighted,
        })
    }

    pub fn cutoff(&self) -> CutoffSpec {
        self.cut
    }

    pub fn cached_frequencies(&self) -> usize {
        self.weighted.len()
    }

    /// `(u, u¹, u²)` in physical space with `u² = u - u¹`.
    pub fn split(
        &self,
        u0: &GridField,
        t: f64,
    ) -> Result<(GridField, GridField, GridField), SpectralError> {
        let uhat = frequency_form(u0)?;
        if uhat.grid != self.grid {
            return Err(SpectralError::ShapeMismatch);
        }
        let u = evolve_hyperbolic(self.sys, &uhat, t)?.to_physical()?;
        let low: Vec<(usize, Vec<Complex64>)> = self
            .weighted
            .par_iter()
            .map(|(p, w)| {
                let k = self.grid.frequency(*p);
                let v = w.matvec(&uhat.at(*p));
                Ok((*p, propagator(self.sys, &k, t)?.matvec(&v)))
            })
            .collect::<Result<_, SpectralError>>()?;
        let mut u1 = GridField::zeros(self.grid, uhat.components, Representation::Frequency);
        for (p, v) in &low {
            u1.set_at(*p, v);
        }
        let u1 = u1.to_physical()?;
        let u2 = u.sub(&u1)?;
        Ok((u, u1, u2))
    }
}

pub fn split_frequencies(
    sys: &HyperbolicSystem,
    p0: &ComplexMatrix,
    u0: &GridField,
    t: f64,
    cut: CutoffSpec,
) -> Result<(GridField, GridField), SpectralError> {
    let ev = SplitEvolver::new(sys, u0.grid, cut, p0)?;
    let (_, u1, u2) = ev.split(u0, t)?;
    Ok((u1, u2))
}

/// `û(k,t) = exp(-c·ik t - (k·Dk) t)·P₀·û₀(k)`.
pub fn evolve_parabolic_phi(
    pl: &ParabolicLimit,
    u0: &GridField,
    t: f64,
) -> Result<GridField, SpectralError> {
    assert!(t >= 0.0, "evolution time must be non-negative");
    let uhat = frequency_form(u0)?;
    let grid = uhat.grid;
    let out = apply_per_frequency(&uhat, |p, v| {
        let k = grid.frequency(p);
        let factor = (-pl.lambda0(&k) * t).exp();
        Ok(pl.p0.matvec(v).into_iter().map(|z| z * factor).collect())
    })?;
    restore(out, u0.representation)
}

/// `û(k,t) = exp(-(k·Dk) t)·(P₀ + Σ ikₕ P₁ₕ)·û₀(k)`.
pub fn evolve_parabolic_psi(
    pl: &ParabolicLimit,
    u0: &GridField,
    t: f64,
) -> Result<GridField, SpectralError> {
    assert!(t >= 0.0, "evolution time must be non-negative");
    let uhat = frequency_form(u0)?;
    let grid = uhat.grid;
    let out = apply_per_frequency(&uhat, |p, v| {
        let k = grid.frequency(p);
        let factor = (-pl.quadratic_form(&k) * t).exp();
        Ok(pl
            .projection_series(&k)
            .matvec(v)
            .into_iter()
            .map(|z| z * factor)
            .collect())
    })?;
    restore(out, u0.representation)
}

/// Multiplies every frequency by `f(|k|)`.
pub fn radial_weight(uhat: &GridField, f: impl Fn(f64) -> f64) -> GridField {
    assert_eq!(
        uhat.representation,
        Representation::Frequency,
        "radial weights act on frequency fields"
    );
    let np = uhat.grid.total();
    let w: Vec<f64> = (0..np).map(|p| f(uhat.grid.frequency_norm(p))).collect();
    let mut out = uhat.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        *v *= w[i % np];
    }
    out
}

/// Sampled `max_w ρ(A(w))` over `samples` unit directions.
pub fn max_wave_speed(sys: &HyperbolicSystem, samples: usize) -> Result<f64, SpectralError> {
    let mut s: f64 = 0.0;
    for w in sphere_samples(sys.dim(), samples) {
        for v in eigenvalues(&sys.a_of(&w))? {
            s = s.max(v.norm());
        }
    }
    Ok(s)
}

/// Rejects runs where `speed·horizon + support > L/2`.
pub fn check_wrap_around(
    grid: &PeriodicGrid,
    speed: f64,
    horizon: f64,
    support: f64,
) -> Result<(), SpectralError> {
    let half = 0.5 * grid.half_width;
    if speed * horizon + support > half {
        return Err(SpectralError::WrapAround {
            speed,
            horizon,
            support,
            half,
        });
    }
    Ok(())
}
