//! Experiment runners: equilibrium reports, parameter sweeps and gradient
//! training, with deterministic CSV and JSON output.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::coate_loury::{CoateLoury, TheoremDiagnostics};
use crate::continuous::{sweep, ContinuousMarket, Metric, PointReport, SweepRow, SweepSettings};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::policy::PolicyPair;
use crate::rc_sgd::{rsgd_run, EmployerLoss, ResponseModel, SgdMode, SgdStep};
use crate::scenario::{ModelKind, ScenarioConfig, SweepAxis};
use crate::two_group::{EquityReport, DEFAULT_REPORT_TOL};

/// Number of starting points for repeated retraining.
pub const RRM_STARTS: usize = 8;

/// Iteration cap for retraining runs in equilibrium reports.
const RRM_MAX_ITERS: usize = 200;

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
}

impl ScenarioConfig {
    pub fn with_overrides(mut self, overrides: Overrides) -> Result<Self> {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(n) = overrides.grid_n {
            self.numerics.grid_n = Some(n);
        }
        self.validate()?;
        Ok(self)
    }
}

/// Formats `v` with 9 significant digits, without an exponent for ordinary
/// magnitudes. Non-finite values print as `nan`, `inf` or `-inf`.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let exponent = rounded.abs().log10().floor() as i32;
    if (-6..15).contains(&exponent) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("writing CSV: {e}"))
}

/// Serializes `value` as pretty JSON with object keys sorted.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("reports serialize to JSON");
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values print");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub theta: f64,
    pub pi: f64,
    pub perf_utility: f64,
    /// `|theta*(pi(theta)) - theta|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RrmRun {
    pub start: f64,
    pub converged: bool,
    pub trajectory: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousRun {
    pub start: PolicyPair,
    pub converged: bool,
    pub iterations: usize,
    pub trajectory: Vec<PolicyPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Equilibria {
    CoateLoury {
        stable: Vec<ThresholdPoint>,
        optimal: Vec<ThresholdPoint>,
        optimal_unique: bool,
        rrm: Vec<RrmRun>,
    },
    TwoGroup {
        stable: Vec<EquityReport>,
        optimal: Vec<EquityReport>,
        optimal_unique: bool,
        max_gap_stable: Option<EquityReport>,
        rrm: Vec<RrmRun>,
    },
    Continuous {
        optimal: PointReport,
        /// Distinct end points of the converged retraining runs.
        stable: Vec<PointReport>,
        rrm: Vec<ContinuousRun>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub model: ModelKind,
    pub config_hash: String,
    pub equilibria: Equilibria,
    pub metrics: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub diagnostics: Option<TheoremDiagnostics>,
    /// Numerical problems met while solving; a nonempty list makes the
    /// command exit with a failure status.
    pub failures: Vec<String>,
    pub wall_time_s: f64,
}

fn spread_starts(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..RRM_STARTS).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / RRM_STARTS as f64)
}

fn rrm_runs(market: &CoateLoury) -> Vec<RrmRun> {
    spread_starts(0.0, 1.0)
        .map(|start| {
            let trace = market.rrm_run(start, RRM_MAX_ITERS);
            RrmRun {
                start,
                converged: trace.converged,
                trajectory: trace.trajectory,
            }
        })
        .collect()
}

fn threshold_point(market: &CoateLoury, theta: f64) -> ThresholdPoint {
    ThresholdPoint {
        theta,
        pi: market.aggregate_response(theta),
        perf_utility: market.perf_utility(theta),
        residual: market.stable_residual(theta),
    }
}

struct Outcome {
    equilibria: Equilibria,
    metrics: BTreeMap<String, f64>,
    checks: BTreeMap<String, bool>,
    diagnostics: Option<TheoremDiagnostics>,
    failures: Vec<String>,
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn solve_coate_loury(cfg: &ScenarioConfig) -> Result<Outcome> {
    let market = cfg.coate_loury_market()?;
    let grid_n = cfg.grid_n();
    let diagnostics = market.diagnose(grid_n);
    let stable: Vec<ThresholdPoint> = market
        .enumerate_stable(grid_n)
        .into_iter()
        .map(|t| threshold_point(&market, t))
        .collect();
    let opt = market.find_optimal(grid_n);
    let optimal: Vec<ThresholdPoint> = opt.maximizers.iter().map(|&t| threshold_point(&market, t)).collect();
    let opt_pi = market.aggregate_response(opt.theta);

    let max_stable_pi = max_of(stable.iter().map(|s| s.pi));
    let max_stable_u = max_of(stable.iter().map(|s| s.perf_utility));
    let metrics = BTreeMap::from([
        ("optimal_theta".to_string(), opt.theta),
        ("optimal_pi".to_string(), opt_pi),
        ("optimal_utility".to_string(), opt.utility),
        ("stable_count".to_string(), stable.len() as f64),
        ("max_stable_pi".to_string(), max_stable_pi),
        ("max_stable_utility".to_string(), max_stable_u),
    ]);
    let checks = BTreeMap::from([
        ("optimal_pi_exceeds_stable".to_string(), stable.iter().all(|s| opt_pi > s.pi)),
        ("optimal_utility_dominates".to_string(), stable.iter().all(|s| s.perf_utility <= opt.utility)),
        (
            "optimal_utility_dominates_by_delta1".to_string(),
            stable.iter().all(|s| s.perf_utility <= opt.utility / (1.0 + diagnostics.delta1)),
        ),
    ]);
    let mut failures = Vec::new();
    if stable.is_empty() {
        failures.push("no stable threshold found".into());
    }
    Ok(Outcome {
        equilibria: Equilibria::CoateLoury {
            stable,
            optimal,
            optimal_unique: opt.unique,
            rrm: rrm_runs(&market),
        },
        metrics,
        checks,
        diagnostics: Some(diagnostics),
        failures,
    })
}

fn solve_two_group(cfg: &ScenarioConfig) -> Result<Outcome> {
    let market = cfg.two_group_market()?;
    let grid_n = cfg.grid_n();
    let diagnostics = market.market.diagnose(grid_n);
    let report = |p: PolicyPair| market.equity_report(p, DEFAULT_REPORT_TOL);
    let stable: Vec<EquityReport> = market.stable_pairs(grid_n).into_iter().map(report).collect();
    let opt = market.market.find_optimal(grid_n);
    let optimal: Vec<EquityReport> = market.optimal_pairs(grid_n).into_iter().map(report).collect();
    let max_gap_stable = market.max_gap_stable_pair(grid_n);

    let max_stable_gap = max_of(stable.iter().map(|r| r.gap));
    let max_optimal_gap = max_of(optimal.iter().map(|r| r.gap));
    let mut metrics = BTreeMap::from([
        ("max_stable_gap".to_string(), max_stable_gap),
        ("max_optimal_gap".to_string(), max_optimal_gap),
        ("optimal_utility".to_string(), opt.utility),
        ("stable_pair_count".to_string(), stable.len() as f64),
        ("epsilon".to_string(), diagnostics.epsilon_sep),
    ]);
    let mut checks = BTreeMap::from([
        ("optimal_gap_below_epsilon".to_string(), max_optimal_gap < diagnostics.epsilon_sep),
        ("discriminatory_stable_exists".to_string(), stable.iter().any(|r| r.discriminatory)),
    ]);
    if let Some(c) = diagnostics.lipschitz_c {
        metrics.insert("lipschitz_c".into(), c);
        checks.insert("stable_gap_exceeds_one_minus_c".into(), max_stable_gap > 1.0 - c);
    }
    let mut failures = Vec::new();
    if stable.is_empty() {
        failures.push("no stable pair found".into());
    }
    Ok(Outcome {
        equilibria: Equilibria::TwoGroup {
            stable,
            optimal,
            optimal_unique: opt.unique,
            max_gap_stable,
            rrm: rrm_runs(&market.market),
        },
        metrics,
        checks,
        diagnostics: Some(diagnostics),
        failures,
    })
}

fn point_metrics(prefix: &str, p: &PointReport, metrics: &mut BTreeMap<String, f64>) {
    let row = SweepRow {
        value: 0.0,
        policy: crate::continuous::PolicyKind::Optimal,
        point: Some(p.clone()),
        error: None,
    };
    for m in Metric::ALL {
        if let Some(v) = m.value(&row) {
            metrics.insert(format!("{prefix}.{}", m.name()), v);
        }
    }
}

fn solve_continuous(cfg: &ScenarioConfig) -> Result<Outcome> {
    let spec = cfg.market_spec()?;
    let tol = cfg.numerics.tolerances;
    let grid_n = cfg.grid_n();
    let stable_tol = cfg.sweep.as_ref().map_or(tol.fixed_point_tol, |s| s.stable_tol);
    let market = ContinuousMarket::with_tolerances(spec, tol)?;
    let domain = market.policy_domain();

    let runs: Vec<ContinuousRun> = spread_starts(domain.lo(), domain.hi())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let m = ContinuousMarket::with_tolerances(spec, tol).expect("spec validated above");
            let start = PolicyPair::uniform(start);
            let s = m.find_stable_continuous(start, stable_tol, RRM_MAX_ITERS, grid_n);
            ContinuousRun {
                start,
                converged: s.converged,
                iterations: s.iterations,
                trajectory: s.trajectory,
            }
        })
        .collect();

    let mut ends: Vec<PolicyPair> = Vec::new();
    for r in runs.iter().filter(|r| r.converged) {
        let end = *r.trajectory.last().unwrap_or(&r.start);
        if !ends.iter().any(|e| e.distance(&end) < 10.0 * stable_tol) {
            ends.push(end);
        }
    }
    let optimal = market.find_optimal_continuous(grid_n, &ends);
    let optimal = market.evaluate(optimal.pair, true);
    let stable: Vec<PointReport> = ends.iter().map(|&p| market.evaluate(p, true)).collect();

    let mut metrics = BTreeMap::new();
    point_metrics("optimal", &optimal, &mut metrics);
    for (i, s) in stable.iter().enumerate() {
        point_metrics(&format!("stable[{i}]"), s, &mut metrics);
    }
    let checks = BTreeMap::from([
        (
            "optimal_utility_dominates".to_string(),
            stable.iter().all(|s| s.employer_utility <= optimal.employer_utility + 1e-9),
        ),
        (
            "optimal_qualified_dominates".to_string(),
            stable.iter().all(|s| s.proportion_qualified <= optimal.proportion_qualified),
        ),
        (
            "stable_welfare_dominates".to_string(),
            stable.iter().all(|s| s.worker_welfare >= optimal.worker_welfare),
        ),
    ]);
    let mut failures = Vec::new();
    if stable.is_empty() {
        failures.push(format!("retraining converged from none of the {RRM_STARTS} starts"));
    }
    for (name, v) in &metrics {
        if !v.is_finite() {
            failures.push(format!("{name} is not finite"));
        }
    }
    Ok(Outcome {
        equilibria: Equilibria::Continuous {
            optimal,
            stable,
            rrm: runs,
        },
        metrics,
        checks,
        diagnostics: None,
        failures,
    })
}

/// Stable and optimal policies of the configured market, with diagnostics.
pub fn run_equilibrium(cfg: &ScenarioConfig) -> Result<RunReport> {
    let started = Instant::now();
    let outcome = match cfg.model {
        ModelKind::CoateLoury => solve_coate_loury(cfg)?,
        ModelKind::TwoGroup => solve_two_group(cfg)?,
        ModelKind::Continuous => solve_continuous(cfg)?,
    };
    Ok(RunReport {
        scenario: cfg.id.clone(),
        model: cfg.model,
        config_hash: cfg.hash(),
        equilibria: outcome.equilibria,
        metrics: outcome.metrics,
        checks: outcome.checks,
        diagnostics: outcome.diagnostics,
        failures: outcome.failures,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// The sweep's axis and values after applying command-line choices.
pub fn sweep_plan(cfg: &ScenarioConfig, axis: Option<SweepAxis>, values: Option<Vec<f64>>) -> Result<(SweepAxis, Vec<f64>)> {
    let configured = cfg.sweep.as_ref();
    let axis = axis
        .or(configured.map(|s| s.axis))
        .ok_or_else(|| Error::config("sweep.axis", "no axis given on the command line or in the config"))?;
    let values = values.or_else(|| configured.map(|s| s.values.clone())).unwrap_or_default();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::config(format!("sweep.values[{i}]"), "must be finite"));
    }
    Ok((axis, values))
}

/// Solves the market at each value of `axis`; rows are in input order,
/// stable before optimal.
pub fn run_sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    let base = cfg.market_spec()?;
    let defaults = crate::scenario::SweepConfig::default();
    let section = cfg.sweep.as_ref().unwrap_or(&defaults);
    let settings = SweepSettings {
        grid_n: cfg.grid_n(),
        stable_tol: section.stable_tol,
        max_iters: section.max_iters,
        tol: cfg.numerics.tolerances,
    };
    Ok(sweep(|v| axis.apply(&base, v), values, &settings))
}

/// Column names of the sweep CSV: key columns, then the metric columns and
/// `error` in alphabetical order.
pub fn sweep_header() -> Vec<&'static str> {
    let mut tail: Vec<&'static str> = Metric::ALL.iter().map(Metric::name).collect();
    tail.push("error");
    tail.sort();
    [vec!["scenario", "axis", "value", "policy"], tail].concat()
}

pub fn write_sweep_csv<W: Write>(out: W, scenario: &str, axis: SweepAxis, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    let header = sweep_header();
    w.write_record(&header).map_err(csv_error)?;
    for row in rows {
        let record: Vec<String> = header
            .iter()
            .map(|&col| match col {
                "scenario" => scenario.to_string(),
                "axis" => axis.name().to_string(),
                "value" => format_sig(row.value),
                "policy" => row.policy.name().to_string(),
                "error" => row.error.clone().unwrap_or_default(),
                name => Metric::parse(name)
                    .and_then(|m| m.value(row))
                    .map(format_sig)
                    .unwrap_or_default(),
            })
            .collect();
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing CSV: {e}")))?;
    Ok(())
}

/// One training run together with the exact utility after each round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgdTrial {
    pub mode: SgdMode,
    pub trial: usize,
    pub steps: Vec<SgdStep>,
    /// Employer performative utility of the hard threshold after each round.
    pub utility: Vec<f64>,
}

/// Both training modes over every trial. Trial `k` of either mode uses the
/// random stream `child(k)` of the scenario seed, so the modes see the same
/// population and batches.
pub fn run_sgd(cfg: &ScenarioConfig) -> Result<Vec<SgdTrial>> {
    let sgd = cfg
        .sgd
        .ok_or_else(|| Error::config("sgd", "missing section, required by the sgd command"))?;
    let spec = cfg.market_spec()?;
    let tol = cfg.numerics.tolerances;
    let market = ContinuousMarket::with_tolerances(spec, tol)?;
    let model = ResponseModel::from_market(&market).map_err(|e| Error::config("continuous", e.to_string()))?;
    let loss = EmployerLoss { base: spec.utility.base };
    let root = RngStream::new(cfg.seed, 0);
    let jobs: Vec<(SgdMode, usize)> = [SgdMode::Performative, SgdMode::Naive]
        .into_iter()
        .flat_map(|mode| (0..sgd.trials).map(move |k| (mode, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(mode, trial)| {
            let steps = rsgd_run(&model, sgd.theta0, &loss, &sgd, mode, root.child(trial as u64))?;
            let m = ContinuousMarket::with_tolerances(spec, tol)?;
            let utility = steps
                .iter()
                .map(|s| m.employer_perf_utility(PolicyPair::uniform(s.theta)))
                .collect();
            Ok(SgdTrial {
                mode,
                trial,
                steps,
                utility,
            })
        })
        .collect()
}

type Summary = fn(&[f64]) -> f64;

pub const SGD_HEADER: [&str; 8] = ["scenario", "mode", "round", "trial", "dropped", "loss_estimate", "theta", "utility"];

/// Per-trial rows, then `mean`, `p05` and `p95` rows across trials, for
/// each mode and round.
pub fn write_sgd_csv<W: Write>(out: W, scenario: &str, trials: &[SgdTrial]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SGD_HEADER).map_err(csv_error)?;
    for mode in [SgdMode::Performative, SgdMode::Naive] {
        let runs: Vec<&SgdTrial> = trials.iter().filter(|t| t.mode == mode).collect();
        let rounds = runs.iter().map(|t| t.steps.len()).max().unwrap_or(0);
        for r in 0..rounds {
            let mut columns: [Vec<f64>; 4] = Default::default();
            for t in &runs {
                let (Some(step), Some(&u)) = (t.steps.get(r), t.utility.get(r)) else {
                    continue;
                };
                let values = [step.dropped as f64, step.loss_estimate, step.theta, u];
                for (c, v) in columns.iter_mut().zip(values) {
                    c.push(v);
                }
                let mut record = vec![scenario.to_string(), mode.name().into(), (r + 1).to_string(), t.trial.to_string()];
                record.extend(values.iter().map(|&v| format_sig(v)));
                w.write_record(&record).map_err(csv_error)?;
            }
            let summaries: [(&str, Summary); 3] = [
                ("mean", |v| v.iter().sum::<f64>() / v.len() as f64),
                ("p05", |v| quantile(v, 0.05)),
                ("p95", |v| quantile(v, 0.95)),
            ];
            for (label, f) in summaries {
                let mut record = vec![scenario.to_string(), mode.name().into(), (r + 1).to_string(), label.into()];
                record.extend(columns.iter().map(|c| format_sig(f(c))));
                w.write_record(&record).map_err(csv_error)?;
            }
        }
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.1234567894), "0.123456789");
        assert_eq!(format_sig(1234567894.0), "1234567890");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(1.5e-9), "1.5e-9");
        assert_eq!(format_sig(f64::NAN), "nan");
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [3.0, 1.0, 2.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert!((quantile(&v, 0.05) - 1.2).abs() < 1e-12);
        assert!((quantile(&v, 0.95) - 4.8).abs() < 1e-12);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn sweep_header_is_sorted_after_keys() {
        let h = sweep_header();
        assert_eq!(&h[..4], ["scenario", "axis", "value", "policy"]);
        let mut tail = h[4..].to_vec();
        tail.sort();
        assert_eq!(tail, h[4..]);
        assert!(h.contains(&"error"));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let mut out = Vec::new();
        write_sweep_csv(&mut out, "x", SweepAxis::A, &[]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn zero_rounds_is_header_only() {
        let mut cfg = ScenarioConfig::preset("sgd-a2w1c5").unwrap();
        cfg.sgd.as_mut().unwrap().rounds = 0;
        let trials = run_sgd(&cfg).unwrap();
        let mut out = Vec::new();
        write_sgd_csv(&mut out, &cfg.id, &trials).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), SGD_HEADER.join(",") + "\n");
    }
}
