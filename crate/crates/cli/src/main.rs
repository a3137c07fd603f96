//! Command-line runner: equilibrium reports, parameter sweeps, SGD traces
//! and the acceptance suite.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use strategic_labor::runner::{
    run_equilibrium, run_sgd, run_sweep, sweep_plan, to_sorted_json, write_sgd_csv, write_sweep_csv, Overrides,
};
use strategic_labor::scenario::{ScenarioConfig, SweepAxis, PRESETS};
use strategic_labor::verify::{run_all_with, VerifyOptions};
use strategic_labor::Error;

#[derive(Parser)]
#[command(name = "strategic-labor", version, about = "Strategic hiring equilibria in labor markets")]
struct Cli {
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scenario grid resolution.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "STRATEGIC_LABOR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario id.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Stable and optimal policies with diagnostics, as JSON.
    Equilibrium {
        #[command(flatten)]
        source: Source,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stable and optimal metrics along one parameter axis, as CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Axis name; defaults to the scenario's sweep section.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values; defaults to the scenario's sweep section.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Performative and naive SGD trajectories, as CSV.
    Sgd {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the acceptance suite; exits 1 if any criterion fails.
    Verify {
        /// Summary JSON file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Quadrature tolerance used by every criterion.
        #[arg(long)]
        quad_tol: Option<f64>,
    },
    /// Lists the built-in scenarios, or prints one as TOML.
    Presets {
        id: Option<String>,
    },
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config { .. }) { 2 } else { 1 };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn config_failure(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting worker pool")?;
    }
    let overrides = Overrides {
        seed: cli.seed,
        grid_n: cli.grid,
    };
    match cli.command {
        Command::Equilibrium { source, out } => {
            let cfg = load(&source, overrides)?;
            let report = run_equilibrium(&cfg)?;
            emit(out.as_deref(), |w| Ok(w.write_all(to_sorted_json(&report).as_bytes())?))?;
            for f in &report.failures {
                eprintln!("failure: {f}");
            }
            Ok(u8::from(!report.failures.is_empty()))
        }
        Command::Sweep {
            source,
            axis,
            values,
            out,
        } => {
            let cfg = load(&source, overrides)?;
            let axis = axis.as_deref().map(SweepAxis::parse).transpose()?;
            let values = values.as_deref().map(parse_values).transpose()?;
            let (axis, values) = sweep_plan(&cfg, axis, values)?;
            let rows = run_sweep(&cfg, axis, &values)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            emit(out.as_deref(), |w| Ok(write_sweep_csv(w, &cfg.id, axis, &rows)?))?;
            if failed > 0 {
                eprintln!("{failed} of {} rows recorded an error", rows.len());
            }
            Ok(u8::from(failed > 0))
        }
        Command::Sgd { source, out } => {
            let cfg = load(&source, overrides)?;
            let trials = run_sgd(&cfg)?;
            emit(out.as_deref(), |w| Ok(write_sgd_csv(w, &cfg.id, &trials)?))?;
            Ok(0)
        }
        Command::Verify { out, quad_tol } => {
            let mut opts = VerifyOptions {
                seed: cli.seed.unwrap_or(0),
                ..VerifyOptions::default()
            };
            if let Some(q) = quad_tol {
                opts.tolerances.quad_tol = q;
            }
            opts.tolerances.validate().map_err(|e| match e {
                Error::Config { message, .. } => Error::Config {
                    key: "--quad-tol".into(),
                    message,
                },
                other => other,
            })?;
            let summary = run_all_with(&opts, |r| {
                let status = if r.pass { "PASS" } else { "FAIL" };
                eprintln!("{status} {:<20} {:>8.2}s  {}", r.id, r.elapsed.as_secs_f64(), r.title);
                for c in r.checks.iter().filter(|c| !c.pass) {
                    eprintln!("     {}: {} not {} {}", c.name, c.measured, relation(c), c.bound);
                }
            });
            emit(out.as_deref(), |w| Ok(w.write_all(summary.to_json().as_bytes())?))?;
            Ok(u8::from(!summary.pass))
        }
        Command::Presets { id: None } => {
            let list: String = PRESETS.iter().map(|(id, _)| format!("{id}\n")).collect();
            emit(None, |w| Ok(w.write_all(list.as_bytes())?))?;
            Ok(0)
        }
        Command::Presets { id: Some(id) } => {
            let cfg = ScenarioConfig::preset(&id)?;
            emit(None, |w| Ok(w.write_all(cfg.to_toml().as_bytes())?))?;
            Ok(0)
        }
    }
}

fn relation(c: &strategic_labor::verify::Check) -> String {
    serde_json::to_value(c.relation)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn load(source: &Source, overrides: Overrides) -> Result<ScenarioConfig, Failure> {
    let cfg = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(config_failure)?;
            ScenarioConfig::parse(&text)?
        }
        (None, Some(id)) => ScenarioConfig::preset(id)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    Ok(cfg.with_overrides(overrides)?)
}

fn parse_values(list: &str) -> Result<Vec<f64>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .with_context(|| format!("invalid configuration at `--values[{i}]`: cannot parse {s:?}"))
                .map_err(config_failure)
        })
        .collect()
}

/// Writes to `path`, or stdout when no path is given.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush().context("writing stdout")?;
        }
    }
    Ok(())
}
