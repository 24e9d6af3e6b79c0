use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Smooth step: 1 for `σ ≤ 0`, 0 for `σ ≥ 1`.
pub fn psi(sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    if sigma >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - sigma)).exp();
    let b = (-1.0 / sigma).exp();
    a / (a + b)
}

/// Frequency cutoffs `χ₁` (inner ball), `χ₃` (outer region) and `χ₂ = 1 - χ₁ - χ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub eps: f64,
    pub rho: f64,
}

impl CutoffSpec {
    pub fn new(eps: f64, rho: f64) -> Result<Self, SpectralError> {
        if !(eps > 0.0 && rho > eps && rho.is_finite()) {
            return Err(SpectralError::InvalidCutoff(format!(
                "need 0 < eps < rho, got eps = {eps}, rho = {rho}"
            )));
        }
        Ok(Self { eps, rho })
    }

    pub fn chi1(&self, s: f64) -> f64 {
        psi(2.0 * s / self.eps - 1.0)
    }

    pub fn chi3(&self, s: f64) -> f64 {
        1.0 - psi((s - self.rho) / self.rho)
    }

    pub fn chi2(&self, s: f64) -> f64 {
        1.0 - self.chi1(s) - self.chi3(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supports() {
        let c = CutoffSpec::new(0.4, 3.0).unwrap();
        assert_eq!(c.chi1(0.2), 1.0);
        assert_eq!(c.chi1(0.4), 0.0);
        assert_eq!(c.chi3(3.0), 0.0);
        assert_eq!(c.chi3(6.0), 1.0);
        for i in 0..1000 {
            let s = i as f64 * 0.01;
            for v in [c.chi1(s), c.chi2(s), c.chi3(s)] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        assert!((psi(0.5) - 0.5).abs() < 1e-15);
        assert!(CutoffSpec::new(1.0, 0.5).is_err());
    }
}
