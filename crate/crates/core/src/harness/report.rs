use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Fit, HarnessError, LpExponent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub t: f64,
    /// Quantity name such as `u1-phi:L2` mapped to its value.
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `|fitted - predicted| ≤ tolerance`.
    Equality,
    /// `fitted ≤ predicted + tolerance`.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    pub quantity: String,
    pub p: LpExponent,
    pub q: LpExponent,
    pub fit: Fit,
    pub predicted: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderCheck {
    pub quantity: String,
    pub fit: Fit,
    pub min_r_squared: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub system: String,
    pub d: usize,
    pub n: usize,
    pub grid_points: usize,
    pub half_width: f64,
    pub eps: f64,
    pub rho: f64,
    pub wave_speed: f64,
    pub samples: Vec<TimeSample>,
    pub rate_checks: Vec<RateCheck>,
    pub remainder: Option<RemainderCheck>,
    /// `‖u - U_Φ‖₂ ≤ ‖u¹ - U_Φ‖₂ + ‖u²‖₂` at every sample.
    pub triangle_ok: bool,
    /// Largest `max|Im u| / max|u|` seen in physical outputs of real data.
    pub max_imaginary_ratio: f64,
    pub passed: bool,
}

impl DecayReport {
    pub fn series(&self, quantity: &str) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut t = Vec::new();
        let mut v = Vec::new();
        for s in &self.samples {
            t.push(s.t);
            v.push(*s.values.get(quantity)?);
        }
        Some((t, v))
    }

    pub fn check(&self, quantity: &str) -> Option<&RateCheck> {
        self.rate_checks.iter().find(|c| c.quantity == quantity)
    }
}

/// `-d/2·(1/q - 1/p) - 1/2`.
pub fn predicted_phi_exponent(d: usize, p: LpExponent, q: LpExponent) -> f64 {
    -(d as f64) / 2.0 * (q.reciprocal() - p.reciprocal()) - 0.5
}

/// `-d/2·(1/q - 1/p) - 1`.
pub fn predicted_psi_exponent(d: usize, p: LpExponent, q: LpExponent) -> f64 {
    -(d as f64) / 2.0 * (q.reciprocal() - p.reciprocal()) - 1.0
}

pub fn write_csv(report: &DecayReport, mut w: impl Write) -> Result<(), HarnessError> {
    writeln!(w, "t,norm_name,value")?;
    for s in &report.samples {
        for (name, v) in &s.values {
            writeln!(w, "{},{},{}", s.t, name, v)?;
        }
    }
    Ok(())
}

pub fn write_json(report: &DecayReport, mut w: impl Write) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<DecayReport, HarnessError> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `report.csv` and `report.json` into `dir`.
pub fn emit_report(report: &DecayReport, dir: &Path) -> Result<(PathBuf, PathBuf), HarnessError> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("report.csv");
    let json = dir.join("report.json");
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    std::fs::write(&csv, buf)?;
    let mut buf = Vec::new();
    write_json(report, &mut buf)?;
    std::fs::write(&json, buf)?;
    Ok((csv, json))
}
