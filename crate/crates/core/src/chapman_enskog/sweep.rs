use num_complex::Complex64;
use serde::Serialize;

use super::LimitError;
use crate::linalg::eigenvalues;
use crate::model::HyperbolicSystem;

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub k: Vec<f64>,
    /// Eigenvalues of `E(ik)` ordered so that index `ℓ` follows one branch across the sweep.
    pub eigenvalues: Vec<Complex64>,
}

/// Two branches meeting at a sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct MergeEvent {
    pub index: usize,
    pub k: Vec<f64>,
    pub branches: (usize, usize),
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub merge_events: Vec<MergeEvent>,
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Spectrum of `E(ik)` along a list of frequencies with branch continuation.
///
/// A merge event is a local minimum of a pair's distance at which the pair
/// either touches (within `1e-6·(1+|λ|)`) or their difference rotates by more
/// than 45° modulo π, as happens when two real branches turn complex.
pub fn eigenvalue_sweep(
    sys: &HyperbolicSystem,
    ks: &[Vec<f64>],
) -> Result<SweepResult, LimitError> {
    let mut points: Vec<SweepPoint> = Vec::with_capacity(ks.len());
    for k in ks {
        let vals = sorted(eigenvalues(&sys.symbol(k).e)?);
        let ordered = match points.len() {
            0 => vals,
            len => {
                let prev = &points[len - 1].eigenvalues;
                let pred: Vec<Complex64> = if len >= 2 {
                    let pp = &points[len - 2].eigenvalues;
                    prev.iter().zip(pp).map(|(a, b)| a * 2.0 - b).collect()
                } else {
                    prev.clone()
                };
                let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
                for (l, p) in pred.iter().enumerate() {
                    for (j, v) in vals.iter().enumerate() {
                        pairs.push((l, j, (p - v).norm()));
                    }
                }
                pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
                let mut out = vec![None; vals.len()];
                let mut used = vec![false; vals.len()];
                for (l, j, _) in pairs {
                    if out[l].is_none() && !used[j] {
                        out[l] = Some(vals[j]);
                        used[j] = true;
                    }
                }
                out.into_iter()
                    .map(|v| v.expect("square assignment"))
                    .collect()
            }
        };
        points.push(SweepPoint {
            k: k.clone(),
            eigenvalues: ordered,
        });
    }

    let mut merge_events = Vec::new();
    let n = sys.size();
    for a in 0..n {
        for b in a + 1..n {
            let diff: Vec<Complex64> = points
                .iter()
                .map(|p| p.eigenvalues[a] - p.eigenvalues[b])
                .collect();
            for i in 1..diff.len().saturating_sub(1) {
                let (g0, g1, g2) = (diff[i - 1].norm(), diff[i].norm(), diff[i + 1].norm());
                if !(g1 <= g0 && g1 <= g2) {
                    continue;
                }
                let scale = 1.0 + points[i].eigenvalues[a].norm();
                let touches = g1 <= 1e-6 * scale;
                let rotated = if g0 > 0.0 && g2 > 0.0 {
                    let ang = (diff[i + 1] / diff[i - 1]).arg().abs();
                    let modpi = ang.min(std::f64::consts::PI - ang);
                    modpi > std::f64::consts::FRAC_PI_4
                } else {
                    false
                };
                if touches || rotated {
                    merge_events.push(MergeEvent {
                        index: i,
                        k: points[i].k.clone(),
                        branches: (a, b),
                        gap: g1,
                    });
                }
            }
        }
    }
    merge_events.sort_by_key(|e| (e.index, e.branches));
    Ok(SweepResult {
        points,
        merge_events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::goldstein_kac_1d;

    #[test]
    fn zero_frequency_is_spectrum_of_b() {
        let r = eigenvalue_sweep(&goldstein_kac_1d(), &[vec![0.0]]).unwrap();
        let v = &r.points[0].eigenvalues;
        assert!(v[0].norm() < 1e-14 && (v[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn detects_exceptional_point() {
        let ks: Vec<Vec<f64>> = (0..=200)
            .map(|i| vec![0.3 + 0.4 * i as f64 / 200.0 + 1e-4])
            .collect();
        let r = eigenvalue_sweep(&goldstein_kac_1d(), &ks).unwrap();
        assert_eq!(r.merge_events.len(), 1, "{:?}", r.merge_events);
        assert!((r.merge_events[0].k[0] - 0.5).abs() < 0.005);
    }

    #[test]
    fn no_event_away_from_collision() {
        let ks: Vec<Vec<f64>> = (0..50).map(|i| vec![0.01 * i as f64]).collect();
        let r = eigenvalue_sweep(&goldstein_kac_1d(), &ks).unwrap();
        assert!(r.merge_events.is_empty());
    }
}
