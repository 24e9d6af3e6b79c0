use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperdiff::chapman_enskog::{compute_parabolic_limit, eigenvalue_sweep, LimitError};
use hyperdiff::harness::{
    emit_report, load_config, read_json, report_exit_code, run_experiment, write_csv, write_json,
    HarnessError,
};
use hyperdiff::model::{check_all, resolve_system, HyperbolicSystem, ModelError, SamplingOptions};

const EXIT_RATE: u8 = 1;
const EXIT_CONDITION: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hyperdiff",
    version,
    about = "Parabolic limits and decay rates of damped hyperbolic systems"
)]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the initial-data seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check conditions A, R, B, D and S.
    Check {
        /// `builtin:<name>` or a system file; defaults to the config's system.
        system: Option<String>,
        #[arg(long, default_value_t = 512)]
        sphere_samples: usize,
        #[arg(long, default_value_t = 61)]
        radial_samples: usize,
    },
    /// Drift, diffusion matrix and projections at k = 0.
    Limit { system: Option<String> },
    /// Eigenvalues of E(ik) along k = s·w.
    Sweep {
        system: Option<String>,
        /// Direction w, comma separated; normalized before use.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0)]
        k_min: f64,
        #[arg(long, default_value_t = 2.0)]
        k_max: f64,
        #[arg(long, default_value_t = 201)]
        count: usize,
    },
    /// Run the decay experiment described by --config.
    Run,
    /// Re-serialize a saved report.json.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(h) = err.downcast_ref::<HarnessError>() {
        return h.exit_code() as u8;
    }
    if let Some(l) = err.downcast_ref::<LimitError>() {
        return match l {
            LimitError::ConditionBViolated(_) | LimitError::ConditionViolated(_) => EXIT_CONDITION,
            _ => EXIT_RATE,
        };
    }
    if err.downcast_ref::<ModelError>().is_some() || err.downcast_ref::<std::io::Error>().is_some()
    {
        return EXIT_CONFIG;
    }
    EXIT_CONFIG
}

fn system_for(cli: &Cli, spec: &Option<String>) -> Result<HyperbolicSystem> {
    match (spec, &cli.config) {
        (Some(s), _) => Ok(resolve_system(s, None)?),
        (None, Some(path)) => {
            let cfg = load_config(path)?;
            Ok(resolve_system(&cfg.system, cfg.base_dir.as_deref())?)
        }
        (None, None) => Err(anyhow!("no system given; pass one or use --config")),
    }
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>, file: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(file), text + "\n")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_check(cli: &Cli, system: &Option<String>, sphere: usize, radial: usize) -> Result<u8> {
    let sys = system_for(cli, system)?;
    let reports = check_all(
        &sys,
        SamplingOptions {
            sphere_samples: sphere,
            radial_samples: radial,
        },
    )?;
    for r in &reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        eprintln!("{:?}  {status}  {}", r.condition, r.notes.join("; "));
    }
    if let Some(dir) = &cli.out {
        emit_json(&reports, &Some(dir.clone()), "conditions.json")?;
    } else {
        emit_json(&reports, &None, "")?;
    }
    Ok(if reports.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_CONDITION
    })
}

fn cmd_limit(cli: &Cli, system: &Option<String>) -> Result<u8> {
    let sys = system_for(cli, system)?;
    let limit = compute_parabolic_limit(&sys)?;
    eprintln!("c = {:?}", limit.c);
    eprintln!("D = {:?}", limit.d);
    emit_json(&limit, &cli.out, "limit.json")?;
    Ok(0)
}

fn cmd_sweep(
    cli: &Cli,
    system: &Option<String>,
    direction: &Option<Vec<f64>>,
    k_min: f64,
    k_max: f64,
    count: usize,
) -> Result<u8> {
    let sys = system_for(cli, system)?;
    let mut w = direction.clone().unwrap_or_else(|| {
        let mut w = vec![0.0; sys.dim()];
        w[0] = 1.0;
        w
    });
    if w.len() != sys.dim() {
        return Err(HarnessError::Config(format!("direction needs {} entries", sys.dim())).into());
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || count < 2 || k_max <= k_min || k_max.is_nan() || k_min.is_nan() {
        return Err(HarnessError::Config(
            "sweep needs a nonzero direction, count ≥ 2 and k_max > k_min".into(),
        )
        .into());
    }
    w.iter_mut().for_each(|x| *x /= norm);
    let ks: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            let s = k_min + (k_max - k_min) * i as f64 / (count - 1) as f64;
            w.iter().map(|x| x * s).collect()
        })
        .collect();
    let result = eigenvalue_sweep(&sys, &ks)?;
    let mut csv = String::from("k,branch,re,im\n");
    for (i, p) in result.points.iter().enumerate() {
        let s = k_min + (k_max - k_min) * i as f64 / (count - 1) as f64;
        for (b, v) in p.eigenvalues.iter().enumerate() {
            csv.push_str(&format!("{s},{b},{},{}\n", v.re, v.im));
        }
    }
    for e in &result.merge_events {
        let s: f64 = e.k.iter().map(|x| x * x).sum::<f64>().sqrt();
        eprintln!(
            "merge at |k| = {s} between branches {} and {} (gap {:e})",
            e.branches.0, e.branches.1, e.gap
        );
    }
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("sweep.csv"), csv)?;
            emit_json(&result, &cli.out, "sweep.json")?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_run(cli: &Cli) -> Result<u8> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("run needs --config".into()))?;
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.initial.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(std::path::absolute(out)?);
    }
    let report = run_experiment(&cfg)?;
    for c in &report.rate_checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        eprintln!(
            "{status}  {}  fitted {:.4} ± {:.4}  predicted {:.4}  ({:?}, tol {})",
            c.quantity, c.fit.slope, c.fit.stderr, c.predicted, c.kind, c.tolerance
        );
    }
    if let Some(r) = &report.remainder {
        let status = if r.passed { "pass" } else { "FAIL" };
        eprintln!(
            "{status}  {}  rate {:.4}  R² {:.4}",
            r.quantity, r.fit.slope, r.fit.r_squared
        );
    }
    if cfg.output.is_none() {
        write_csv(&report, std::io::stdout().lock())?;
    }
    Ok(report_exit_code(&report) as u8)
}

fn cmd_report(cli: &Cli, input: &Path, format: Format) -> Result<u8> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let report = read_json(&text)?;
    match &cli.out {
        Some(dir) => {
            emit_report(&report, dir)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            match format {
                Format::Csv => write_csv(&report, &mut out)?,
                Format::Json => write_json(&report, &mut out)?,
            }
            out.flush()?;
        }
    }
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    match &cli.command {
        Command::Check {
            system,
            sphere_samples,
            radial_samples,
        } => cmd_check(cli, system, *sphere_samples, *radial_samples),
        Command::Limit { system } => cmd_limit(cli, system),
        Command::Sweep {
            system,
            direction,
            k_min,
            k_max,
            count,
        } => cmd_sweep(cli, system, direction, *k_min, *k_max, *count),
        Command::Run => cmd_run(cli),
        Command::Report { input, format } => cmd_report(cli, input, *format),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
