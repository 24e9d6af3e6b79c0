use serde::{Deserialize, Serialize};

use super::HarnessError;

pub const MIN_FIT_POINTS: usize = 6;

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Fit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Fit {
        slope,
        stderr,
        intercept,
        r_squared,
    }
}

fn validate(times: &[f64], values: &[f64]) -> Result<(), HarnessError> {
    if times.len() != values.len() || times.len() < MIN_FIT_POINTS {
        return Err(HarnessError::TooFewPoints {
            found: times.len().min(values.len()),
            needed: MIN_FIT_POINTS,
        });
    }
    if let Some(i) = values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(HarnessError::NonPositiveValue {
            index: i,
            value: values[i],
        });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] > 0.0) {
        return Err(HarnessError::Config(
            "fit times must be positive and increasing".into(),
        ));
    }
    Ok(())
}

/// Power law: slope of `log v` against `log t`.
pub fn fit_rate(times: &[f64], values: &[f64]) -> Result<Fit, HarnessError> {
    validate(times, values)?;
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&x, &y))
}

/// Exponential: slope of `log v` against `t`.
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<Fit, HarnessError> {
    validate(times, values)?;
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(least_squares(times, &y))
}
