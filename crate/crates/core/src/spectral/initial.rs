use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{GridField, PeriodicGrid, Representation, SpectralError};

/// Radius in units of `σ` beyond which a Gaussian falls below `1e-12` of its peak.
pub const TAIL_RADIUS_FACTOR: f64 = 7.433_462_579_326_658;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialKind {
    /// Unit-mass Gaussian times the normalized `weights` vector (default `e₀`).
    Gaussian {
        sigma: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// Smooth compactly supported bump of radius `radius`, unit mass.
    Bump {
        radius: f64,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// Real random field with spectrum in `k_min ≤ |k| ≤ k_max`.
    RandomBand { k_min: f64, k_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub field: GridField,
    pub norms: DataNorms,
    /// Radius of a ball containing the data up to `1e-12`; `None` for non-localized data.
    pub support: Option<f64>,
}

fn unit_weights(weights: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>, SpectralError> {
    let w = match weights {
        Some(w) if w.len() == n => w.clone(),
        Some(w) => {
            return Err(SpectralError::InvalidGrid(format!(
                "weights have length {}, expected {n}",
                w.len()
            )))
        }
        None => {
            let mut w = vec![0.0; n];
            w[0] = 1.0;
            w
        }
    };
    let s = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if s == 0.0 {
        return Err(SpectralError::InvalidGrid("weights are zero".into()));
    }
    Ok(w.into_iter().map(|x| x / s).collect())
}

pub fn make_initial_data(
    grid: PeriodicGrid,
    n: usize,
    kind: &InitialKind,
    seed: u64,
) -> Result<InitialData, SpectralError> {
    let d = grid.d as i32;
    let (field, support) = match kind {
        InitialKind::Gaussian {
            sigma,
            center,
            weights,
        } => {
            let w = unit_weights(weights, n)?;
            let c = center.clone().unwrap_or_else(|| vec![0.0; grid.d]);
            if c.len() != grid.d {
                return Err(SpectralError::InvalidGrid(
                    "center has wrong dimension".into(),
                ));
            }
            let offset = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let support = TAIL_RADIUS_FACTOR * sigma + offset;
            if !(*sigma > 0.0) || support > grid.half_width {
                return Err(SpectralError::SupportTooWide {
                    support,
                    half_width: grid.half_width,
                });
            }
            let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.5 * d as f64);
            let f = GridField::from_fn(grid, n, |x| {
                let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                let g = norm * (-r2 / (2.0 * sigma * sigma)).exp();
                w.iter().map(|wi| Complex64::new(g * wi, 0.0)).collect()
            });
            (f, Some(support))
        }
        InitialKind::Bump { radius, weights } => {
            let w = unit_weights(weights, n)?;
            if !(*radius > 0.0) || *radius > grid.half_width {
                return Err(SpectralError::SupportTooWide {
                    support: *radius,
                    half_width: grid.half_width,
                });
            }
            let bump = |x: &[f64]| {
                let s = x.iter().map(|v| v * v).sum::<f64>() / (radius * radius);
                if s < 1.0 {
                    (-1.0 / (1.0 - s)).exp()
                } else {
                    0.0
                }
            };
            let mass: f64 =
                (0..grid.total()).map(|p| bump(&grid.point(p))).sum::<f64>() * grid.cell_volume();
            if mass == 0.0 {
                return Err(SpectralError::InvalidGrid(
                    "bump radius below grid resolution".into(),
                ));
            }
            let f = GridField::from_fn(grid, n, |x| {
                let b = bump(x) / mass;
                w.iter().map(|wi| Complex64::new(b * wi, 0.0)).collect()
            });
            (f, Some(*radius))
        }
        InitialKind::RandomBand { k_min, k_max } => {
            if !(0.0 <= *k_min && k_min < k_max) || *k_max >= grid.nyquist() {
                return Err(SpectralError::InvalidGrid(format!(
                    "band [{k_min}, {k_max}] must lie below {}",
                    grid.nyquist()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f = GridField::zeros(grid, n, Representation::Frequency);
            let np = grid.total();
            for c in 0..n {
                for p in 0..np {
                    let s = grid.frequency_norm(p);
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    if s >= *k_min && s <= *k_max {
                        f.values[c * np + p] = Complex64::new(re, im);
                    }
                }
            }
            let mut phys = f.to_physical()?;
            phys.values
                .iter_mut()
                .for_each(|v| *v = Complex64::new(v.re, 0.0));
            (phys, None)
        }
    };
    let norms = DataNorms {
        l1: field.lp_norm(1.0)?,
        l2: field.lp_norm(2.0)?,
        linf: field.lp_norm(f64::INFINITY)?,
    };
    Ok(InitialData {
        field,
        norms,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_norms() {
        let g = PeriodicGrid::new(2, 128, 20.0).unwrap();
        let sigma = 2.0;
        let data = make_initial_data(
            g,
            3,
            &InitialKind::Gaussian {
                sigma,
                center: None,
                weights: Some(vec![1.0, 1.0, 0.0]),
            },
            0,
        )
        .unwrap();
        assert!((data.norms.l1 - 1.0).abs() < 1e-6);
        let l2 = (4.0 * PI * sigma * sigma).powf(-0.5);
        assert!((data.norms.l2 / l2 - 1.0).abs() < 1e-6);
        let linf = 1.0 / (2.0 * PI * sigma * sigma);
        assert!((data.norms.linf / linf - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_too_wide() {
        let g = PeriodicGrid::new(1, 64, 10.0).unwrap();
        let kind = InitialKind::Gaussian {
            sigma: 2.0,
            center: None,
            weights: None,
        };
        assert!(matches!(
            make_initial_data(g, 1, &kind, 0),
            Err(SpectralError::SupportTooWide { .. })
        ));
    }

    #[test]
    fn bump_support() {
        let g = PeriodicGrid::new(1, 256, 10.0).unwrap();
        let data = make_initial_data(
            g,
            2,
            &InitialKind::Bump {
                radius: 3.0,
                weights: None,
            },
            0,
        )
        .unwrap();
        for p in 0..g.total() {
            if g.point(p)[0].abs() >= 3.0 {
                assert_eq!(data.field.at(p)[0], Complex64::new(0.0, 0.0));
            }
        }
        assert!((data.norms.l1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_band_spectrum_and_seed() {
        let g = PeriodicGrid::new(2, 32, 8.0).unwrap();
        let kind = InitialKind::RandomBand {
            k_min: 1.0,
            k_max: 2.5,
        };
        let a = make_initial_data(g, 1, &kind, 7).unwrap();
        let b = make_initial_data(g, 1, &kind, 7).unwrap();
        assert_eq!(a.field, b.field);
        let spec = a.field.to_frequency().unwrap();
        let top = spec.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for p in 0..g.total() {
            let s = g.frequency_norm(p);
            if !(1.0..=2.5).contains(&s) {
                assert!(spec.values[p].norm() < 1e-12 * top);
            }
        }
        assert!(a.field.values.iter().all(|v| v.im == 0.0));
    }
}
