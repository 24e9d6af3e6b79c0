//! Decay-rate experiments: norms, fits and reports.

mod config;
mod fit;
mod report;

pub use config::{
    load_config, parse_config, CutoffConfig, ExperimentConfig, GridConfig, InitialConfig,
    LpExponent, NamedRadius, NormPair, Profile, RadiusChoice, Schedule,
};
pub use fit::{fit_exponential, fit_rate, Fit, MIN_FIT_POINTS};
pub use report::{
    emit_report, predicted_phi_exponent, predicted_psi_exponent, read_json, write_csv, write_json,
    CheckKind, DecayReport, RateCheck, RemainderCheck, TimeSample,
};

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::chapman_enskog::{
    compute_parabolic_limit, separation_radius, LimitError, ParabolicLimit,
};
use crate::model::{
    check_condition_b, check_condition_d, check_condition_s, resolve_system, HyperbolicSystem,
    ModelError, SamplingOptions,
};
use crate::spectral::{
    check_wrap_around, evolve_parabolic_phi, evolve_parabolic_psi, make_initial_data,
    max_wave_speed, radial_weight, write_snapshot, CutoffSpec, GridField, PeriodicGrid,
    SpectralError, SplitEvolver,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("value {value} at index {index} is not positive")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("fit needs {needed} points, found {found}")]
    TooFewPoints { found: usize, needed: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("condition {0} fails")]
    ConditionViolated(String),
    #[error("wrap-around guard: {0}")]
    WrapAroundGuard(SpectralError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl HarnessError {
    /// 2 for condition failures, 3 for configuration and input errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ConditionViolated(_) | Self::Limit(LimitError::ConditionBViolated(_)) => 2,
            Self::Config(_)
            | Self::WrapAroundGuard(_)
            | Self::Io(_)
            | Self::Json(_)
            | Self::Model(
                ModelError::Parse(_) | ModelError::Io { .. } | ModelError::UnknownBuiltin(_),
            )
            | Self::Model(ModelError::InvalidSystem(_) | ModelError::Ragged(_))
            | Self::Spectral(
                SpectralError::InvalidGrid(_)
                | SpectralError::SupportTooWide { .. }
                | SpectralError::InvalidCutoff(_),
            ) => 3,
            _ => 1,
        }
    }
}

/// Exit code for a finished report.
pub fn report_exit_code(report: &DecayReport) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

pub fn lp_norm(f: &GridField, p: LpExponent) -> Result<f64, HarnessError> {
    Ok(f.lp_norm(p.value())?)
}

pub fn quantity_name(base: &str, p: LpExponent) -> String {
    format!("{base}:{}", p.label())
}

/// Resolves the system, checks the conditions the configured comparisons need and
/// returns it with its parabolic limit.
pub fn prepare_system(
    cfg: &ExperimentConfig,
) -> Result<(HyperbolicSystem, ParabolicLimit), HarnessError> {
    let sys = resolve_system(&cfg.system, cfg.base_dir.as_deref())?;
    if !check_condition_b(&sys)?.passed {
        return Err(HarnessError::ConditionViolated("B".into()));
    }
    let opts = SamplingOptions::default();
    if !check_condition_d(&sys, opts.radial_samples, opts.sphere_samples)?.passed {
        return Err(HarnessError::ConditionViolated("D".into()));
    }
    if cfg.profile.psi() && !check_condition_s(&sys)?.passed {
        return Err(HarnessError::ConditionViolated("S".into()));
    }
    let limit = compute_parabolic_limit(&sys)?;
    Ok((sys, limit))
}

/// Inner radius `ε` and outer radius `ρ` for a configuration.
pub fn resolve_cutoff(
    sys: &HyperbolicSystem,
    cfg: &CutoffConfig,
) -> Result<CutoffSpec, HarnessError> {
    let eps = match cfg.eps {
        RadiusChoice::Value(v) => v,
        RadiusChoice::Named(NamedRadius::Auto) => 0.5 * separation_radius(sys)?,
        RadiusChoice::Named(NamedRadius::Max) => separation_radius(sys)?,
    };
    let rho = match cfg.rho {
        RadiusChoice::Value(v) => v,
        RadiusChoice::Named(_) => 10.0 * (sys.b().norm() + 1.0),
    };
    Ok(CutoffSpec::new(eps, rho)?)
}

fn check_rate(
    quantity: String,
    times: &[f64],
    values: &[f64],
    p: LpExponent,
    q: LpExponent,
    predicted: f64,
    tol: f64,
) -> Result<RateCheck, HarnessError> {
    let fit = fit_rate(times, values)?;
    let kind = if q.value() == 1.0 {
        CheckKind::Equality
    } else {
        CheckKind::Bound
    };
    let passed = match kind {
        CheckKind::Equality => (fit.slope - predicted).abs() <= tol,
        CheckKind::Bound => fit.slope <= predicted + tol,
    };
    Ok(RateCheck {
        quantity,
        p,
        q,
        fit,
        predicted,
        tolerance: tol,
        kind,
        passed,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<DecayReport, HarnessError> {
    cfg.validate()?;
    let (sys, limit) = prepare_system(cfg)?;
    let grid = PeriodicGrid::new(sys.dim(), cfg.grid.n, cfg.grid.half_width)?;
    let data = make_initial_data(grid, sys.size(), &cfg.initial.kind, cfg.initial.seed)?;
    let speed = max_wave_speed(&sys, 256)?;
    let support = data.support.unwrap_or(grid.half_width);
    check_wrap_around(&grid, speed, cfg.schedule.t_max, support)
        .map_err(HarnessError::WrapAroundGuard)?;
    let cut = resolve_cutoff(&sys, &cfg.cutoff)?;
    log::info!(
        "{}: eps = {:.6}, rho = {:.3}, wave speed = {:.4}",
        sys.name,
        cut.eps,
        cut.rho,
        speed
    );

    let evolver = SplitEvolver::new(&sys, grid, cut, &limit.p0)?;
    let u0_hat = data.field.to_frequency()?;
    let times = cfg.schedule.times();
    let mut ps: Vec<LpExponent> = cfg.norms.iter().map(|n| n.p).collect();
    ps.push(LpExponent::Finite(2.0));
    ps.sort_by(|a, b| a.value().total_cmp(&b.value()));
    ps.dedup();
    let snapshot_dir = match (cfg.snapshots, cfg.output_dir()) {
        (true, Some(dir)) => {
            let d = dir.join("fields");
            std::fs::create_dir_all(&d)?;
            Some(d)
        }
        _ => None,
    };

    let per_time: Vec<(TimeSample, bool, f64)> = times
        .par_iter()
        .enumerate()
        .map(|(idx, &t)| {
            let (u, u1, u2) = evolver.split(&u0_hat, t)?;
            let mut values = BTreeMap::new();
            let mut imag = u.imaginary_ratio().max(u1.imaginary_ratio());
            let phi_hat = evolve_parabolic_phi(&limit, &u0_hat, t)?;
            let phi = phi_hat.to_physical()?;
            let diff_phi = u1.sub(&phi)?;
            let low_phi = u1.sub(&radial_weight(&phi_hat, |s| cut.chi1(s)).to_physical()?)?;
            let (diff_psi, low_psi) = if cfg.profile.psi() {
                let psi_hat = evolve_parabolic_psi(&limit, &u0_hat, t)?;
                let psi = psi_hat.to_physical()?;
                imag = imag.max(psi.imaginary_ratio());
                let low = u1.sub(&radial_weight(&psi_hat, |s| cut.chi1(s)).to_physical()?)?;
                (Some(u1.sub(&psi)?), Some(low))
            } else {
                (None, None)
            };
            for &p in &ps {
                if cfg.profile.phi() {
                    values.insert(quantity_name("u1-phi", p), lp_norm(&diff_phi, p)?);
                }
                if let Some(d) = &diff_psi {
                    values.insert(quantity_name("u1-psi", p), lp_norm(d, p)?);
                }
                values.insert(quantity_name("u", p), lp_norm(&u, p)?);
            }
            let whole = lp_norm(&u.sub(&phi)?, LpExponent::Finite(2.0))?;
            let rem = lp_norm(&u2, LpExponent::Finite(2.0))?;
            let low = lp_norm(&diff_phi, LpExponent::Finite(2.0))?;
            if cfg.profile.phi() {
                values.insert(
                    "u1-chi-phi:L2".into(),
                    lp_norm(&low_phi, LpExponent::Finite(2.0))?,
                );
            }
            if let Some(d) = &low_psi {
                values.insert("u1-chi-psi:L2".into(), lp_norm(d, LpExponent::Finite(2.0))?);
            }
            values.insert("u-phi:L2".into(), whole);
            values.insert("u2:L2".into(), rem);
            let triangle = whole <= (low + rem) * (1.0 + 1e-12) + 1e-300;
            if let Some(dir) = &snapshot_dir {
                for (label, f) in [("u", &u), ("u1", &u1), ("u2", &u2)] {
                    let file = std::fs::File::create(dir.join(format!("{label}-{idx:03}.bin")))?;
                    write_snapshot(f, t, std::io::BufWriter::new(file))?;
                }
            }
            Ok((TimeSample { t, values }, triangle, imag))
        })
        .collect::<Result<_, HarnessError>>()?;

    let triangle_ok = per_time.iter().all(|x| x.1);
    let max_imaginary_ratio = per_time.iter().map(|x| x.2).fold(0.0, f64::max);
    let samples: Vec<TimeSample> = per_time.into_iter().map(|x| x.0).collect();
    let mut report = DecayReport {
        system: sys.name.to_string(),
        d: sys.dim(),
        n: sys.size(),
        grid_points: grid.n,
        half_width: grid.half_width,
        eps: cut.eps,
        rho: cut.rho,
        wave_speed: speed,
        samples,
        rate_checks: Vec::new(),
        remainder: None,
        triangle_ok,
        max_imaginary_ratio,
        passed: false,
    };
    if times.len() >= MIN_FIT_POINTS {
        let d = sys.dim();
        for pair in &cfg.norms {
            let profiles = [
                (
                    cfg.profile.phi(),
                    "u1-phi",
                    predicted_phi_exponent(d, pair.p, pair.q),
                ),
                (
                    cfg.profile.psi(),
                    "u1-psi",
                    predicted_psi_exponent(d, pair.p, pair.q),
                ),
            ];
            for (on, base, predicted) in profiles {
                if !on {
                    continue;
                }
                let name = quantity_name(base, pair.p);
                let (t, v) = report
                    .series(&name)
                    .expect("quantity recorded at every time");
                report.rate_checks.push(check_rate(
                    name,
                    &t,
                    &v,
                    pair.p,
                    pair.q,
                    predicted,
                    cfg.tolerance,
                )?);
            }
        }
        let (t, v) = report.series("u2:L2").expect("remainder recorded");
        let fit = fit_exponential(&t, &v)?;
        report.remainder = Some(RemainderCheck {
            quantity: "u2:L2".into(),
            fit,
            min_r_squared: cfg.remainder_min_r2,
            passed: fit.slope < 0.0 && fit.r_squared >= cfg.remainder_min_r2,
        });
    }
    report.passed = report.triangle_ok
        && report.rate_checks.iter().all(|c| c.passed)
        && report.remainder.as_ref().is_none_or(|r| r.passed);
    if let Some(dir) = cfg.output_dir() {
        emit_report(&report, &dir)?;
    }
    Ok(report)
}
