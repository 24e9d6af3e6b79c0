//! TOML system files.
//!
//! ```toml
//! name = "damped-euler-2d"
//! d = 2
//! n = 3
//! A = [
//!   [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
//!   [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
//! ]
//! B = [[0, 0, 0], [0, 1, 0], [0, 0, 1]]
//! S = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
//!
//! [[R_samples]]
//! w = [1.0, 0.0]
//! R = [[0.5, 0, 0.5], [-0.5, 0, 0.5], [0, -1, 0]]
//! ```

use std::path::Path;

use serde::Deserialize;

use super::{builtin_system, Diagonalizer, HyperbolicSystem, ModelError};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    name: Option<String>,
    d: usize,
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "S")]
    s: Option<Vec<Vec<f64>>>,
    #[serde(rename = "R_samples", default)]
    r_samples: Vec<RSample>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RSample {
    w: Vec<f64>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
}

fn square(name: &str, rows: &[Vec<f64>], n: usize) -> Result<ComplexMatrix, ModelError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        if rows
            .iter()
            .any(|r| r.len() != rows.first().map_or(0, Vec::len))
        {
            return Err(ModelError::Ragged(name.to_string()));
        }
        return Err(ModelError::InvalidSystem(format!("{name} must be {n}x{n}")));
    }
    ComplexMatrix::from_real_rows(rows)
        .map_err(|e| ModelError::InvalidSystem(format!("{name}: {e}")))
}

pub fn parse_system(text: &str) -> Result<HyperbolicSystem, ModelError> {
    let file: SystemFile =
        toml::from_str(text).map_err(|e| ModelError::Parse(e.message().to_string()))?;
    if file.a.len() != file.d {
        return Err(ModelError::InvalidSystem(format!(
            "expected {} matrices in A, found {}",
            file.d,
            file.a.len()
        )));
    }
    let a = file
        .a
        .iter()
        .enumerate()
        .map(|(j, rows)| square(&format!("A{}", j + 1), rows, file.n))
        .collect::<Result<Vec<_>, _>>()?;
    let b = square("B", &file.b, file.n)?;
    let mut sys = HyperbolicSystem::new(a, b)?;
    if let Some(name) = file.name {
        sys = sys.named(name);
    }
    if let Some(s) = file.s {
        sys = sys.with_symmetry(square("S", &s, file.n)?)?;
    }
    if !file.r_samples.is_empty() {
        let mut samples = Vec::with_capacity(file.r_samples.len());
        for (i, rs) in file.r_samples.iter().enumerate() {
            if rs.w.len() != file.d {
                return Err(ModelError::InvalidSystem(format!(
                    "R_samples[{i}].w must have length {}",
                    file.d
                )));
            }
            samples.push((
                rs.w.clone(),
                square(&format!("R_samples[{i}].R"), &rs.r, file.n)?,
            ));
        }
        sys = sys.with_diagonalizer(Diagonalizer::Sampled(samples))?;
    }
    Ok(sys)
}

pub fn load_system(path: &Path) -> Result<HyperbolicSystem, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_system(&text)
}

/// `builtin:<name>` or a path to a system file, relative paths resolved against `base`.
pub fn resolve_system(spec: &str, base: Option<&Path>) -> Result<HyperbolicSystem, ModelError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_system(name);
    }
    let p = Path::new(spec);
    match base {
        Some(dir) if p.is_relative() => load_system(&dir.join(p)),
        _ => load_system(p),
    }
}
