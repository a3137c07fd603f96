//! Executable acceptance checks.
//!
//! Each criterion computes its measured quantities, compares them against
//! fixed bounds and reports every comparison. Results depend only on the
//! seed and tolerances, so the JSON summary is reproducible byte for byte.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::continuous::{
    BaseUtility, ContinuousMarket, CostKind, CostSpec, KernelFamily, MarketSpec, PolicyKind, Production, SkillSpec,
    SweepRow, UtilitySpec, WageStructure,
};
use crate::error::Result;
use crate::numerics::{golden_section_max, integrate_best_effort, Interval, RngStream, Tolerances};
use crate::policy::{Group, PolicyPair};
use crate::rc_sgd::{EmployerLoss, ResponseModel, SgdMode, SmoothPolicy};
use crate::runner::{run_sgd, run_sweep, to_sorted_json, RRM_STARTS};
use crate::scenario::ScenarioConfig;
use crate::two_group::DEFAULT_REPORT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    fn holds(&self, measured: f64, bound: f64) -> bool {
        match self {
            Relation::Lt => measured < bound,
            Relation::Le => measured <= bound,
            Relation::Gt => measured > bound,
            Relation::Ge => measured >= bound,
            Relation::Eq => measured == bound,
        }
    }
}

/// One comparison `measured <relation> bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub runtime_budget_s: f64,
    pub checks: Vec<Check>,
    /// Failures that prevented a measurement, and offending sweep rows.
    pub notes: Vec<String>,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

impl VerifySummary {
    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tolerances: Tolerances,
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget_s: f64,
    run: fn(&VerifyOptions, &mut Recorder) -> Result<()>,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: "high-wage-welfare",
        title: "high-wage market: optimal skilled share and utility dominate every stable threshold",
        budget_s: 10.0,
        run: high_wage_welfare,
    },
    Criterion {
        id: "low-wage-welfare",
        title: "low-wage market: optimal skilled share and utility dominate every stable threshold",
        budget_s: 10.0,
        run: low_wage_welfare,
    },
    Criterion {
        id: "high-wage-equity",
        title: "high-wage two-group market: a stable pair with gap above 1 - c, optimal gaps below eps",
        budget_s: 30.0,
        run: high_wage_equity,
    },
    Criterion {
        id: "low-wage-equity",
        title: "low-wage two-group market: a discriminatory stable pair, unique non-discriminatory optimum",
        budget_s: 30.0,
        run: low_wage_equity,
    },
    Criterion {
        id: "stable-residuals",
        title: "stable points are fixed points of retraining; retraining stops at step 1e-3",
        budget_s: 5.0,
        run: stable_residuals,
    },
    Criterion {
        id: "threshold-dominance",
        title: "best threshold beats the best 64-bin randomized policy on an MLR market",
        budget_s: 60.0,
        run: threshold_dominance,
    },
    Criterion {
        id: "nash-wage",
        title: "Gaussian zero-profit wages match x/2 and break even",
        budget_s: 20.0,
        run: nash_wage,
    },
    Criterion {
        id: "gradient-oracle",
        title: "REINFORCE gradient agrees with finite differences of the quadrature loss",
        budget_s: 180.0,
        run: gradient_oracle,
    },
    Criterion {
        id: "sgd-end-to-end",
        title: "performative SGD lands near the optimum and beats the naive baseline",
        budget_s: 180.0,
        run: sgd_end_to_end,
    },
    Criterion {
        id: "linear-orderings",
        title: "optimal policies qualify more workers, stable policies pay workers more",
        budget_s: 120.0,
        run: linear_orderings,
    },
];

pub const DETERMINISM_ID: &str = "determinism";

/// Identifiers of every criterion in run order.
pub fn criterion_ids() -> Vec<&'static str> {
    CRITERIA.iter().map(|c| c.id).chain([DETERMINISM_ID]).collect()
}

#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, measured: f64, relation: Relation, bound: f64) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            relation,
            bound,
            pass: relation.holds(measured, bound),
        });
    }
}

fn execute(c: &Criterion, opts: &VerifyOptions) -> CriterionResult {
    let started = Instant::now();
    let mut rec = Recorder::default();
    if let Err(e) = (c.run)(opts, &mut rec) {
        rec.notes.push(format!("error: {e}"));
    }
    let pass = !rec.checks.is_empty() && rec.checks.iter().all(|k| k.pass) && !rec.notes.iter().any(|n| n.starts_with("error"));
    CriterionResult {
        id: c.id,
        title: c.title,
        runtime_budget_s: c.budget_s,
        checks: rec.checks,
        notes: rec.notes,
        pass,
        elapsed: started.elapsed(),
    }
}

/// Runs one criterion by id. The determinism criterion reruns everything.
pub fn run_criterion(id: &str, opts: &VerifyOptions) -> Option<CriterionResult> {
    if id == DETERMINISM_ID {
        return Some(determinism(opts, &run_primary(opts)));
    }
    CRITERIA.iter().find(|c| c.id == id).map(|c| execute(c, opts))
}

fn run_primary(opts: &VerifyOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| execute(c, opts)).collect()
}

/// Reruns every other criterion and compares serialized results.
fn determinism(opts: &VerifyOptions, first: &[CriterionResult]) -> CriterionResult {
    let started = Instant::now();
    let second = run_primary(opts);
    let mut rec = Recorder::default();
    let mut differing = 0;
    for (a, b) in first.iter().zip(&second) {
        if to_sorted_json(a) != to_sorted_json(b) {
            differing += 1;
            rec.notes.push(format!("{} differs between runs", a.id));
        }
    }
    rec.check("criteria with differing output", differing as f64, Relation::Eq, 0.0);
    CriterionResult {
        id: DETERMINISM_ID,
        title: "a second run with the same seed reproduces every result exactly",
        runtime_budget_s: CRITERIA.iter().map(|c| c.budget_s).sum(),
        pass: differing == 0,
        checks: rec.checks,
        notes: rec.notes,
        elapsed: started.elapsed(),
    }
}

/// Every criterion, with the determinism check last.
pub fn run_all(opts: &VerifyOptions) -> VerifySummary {
    run_all_with(opts, |_| {})
}

/// Like [`run_all`], calling `progress` as each criterion finishes.
pub fn run_all_with(opts: &VerifyOptions, mut progress: impl FnMut(&CriterionResult)) -> VerifySummary {
    let mut criteria = Vec::new();
    for c in &CRITERIA {
        let r = execute(c, opts);
        progress(&r);
        criteria.push(r);
    }
    let d = determinism(opts, &criteria);
    progress(&d);
    criteria.push(d);
    VerifySummary {
        seed: opts.seed,
        tolerances: opts.tolerances,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

fn preset(id: &str, opts: &VerifyOptions) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::preset(id)?;
    cfg.seed = opts.seed;
    cfg.numerics.tolerances = opts.tolerances;
    cfg.validate()?;
    Ok(cfg)
}

fn min_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn high_wage_welfare(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cfg = preset("thm31-demo", opts)?;
    let m = cfg.coate_loury_market()?;
    let grid = cfg.grid_n();
    let d = m.diagnose(grid);
    let p = m.params;
    rec.check("wage vs M_G / delta1", p.wage, Relation::Gt, d.m_g / d.delta1);
    rec.check("p+ vs p- / (delta1 delta2)", p.reward_pos, Relation::Gt, p.penalty_neg / (d.delta1 * d.delta2));
    let stable = m.enumerate_stable(grid);
    let opt = m.find_optimal(grid);
    let pi_opt = m.aggregate_response(opt.theta);
    rec.check("stable thresholds found", stable.len() as f64, Relation::Ge, 1.0);
    rec.check(
        "min over stable of pi(opt) - pi(stable)",
        min_of(stable.iter().map(|&s| pi_opt - m.aggregate_response(s))),
        Relation::Gt,
        0.0,
    );
    rec.check(
        "max over stable of U(stable) - U(opt) / (1 + delta1)",
        max_of(stable.iter().map(|&s| m.perf_utility(s) - opt.utility / (1.0 + d.delta1))),
        Relation::Le,
        0.0,
    );
    Ok(())
}

fn low_wage_welfare(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cfg = preset("thm32-demo", opts)?;
    let m = cfg.coate_loury_market()?;
    let grid = cfg.grid_n();
    let d = m.diagnose(grid);
    let p = m.params;
    let pi = d.pi_at_delta1_arg;
    rec.check("wage", p.wage, Relation::Gt, 0.0);
    rec.check("p+ vs max(1, p- pi / (1 - pi))", p.reward_pos, Relation::Gt, (p.penalty_neg * pi / (1.0 - pi)).max(1.0));
    rec.check("delta1 delta2 vs p-", d.delta1 * d.delta2, Relation::Gt, p.penalty_neg);
    let stable = m.enumerate_stable(grid);
    let opt = m.find_optimal(grid);
    let pi_opt = m.aggregate_response(opt.theta);
    rec.check("stable thresholds found", stable.len() as f64, Relation::Ge, 1.0);
    rec.check(
        "min over stable of pi(opt) - pi(stable)",
        min_of(stable.iter().map(|&s| pi_opt - m.aggregate_response(s))),
        Relation::Gt,
        0.0,
    );
    rec.check(
        "max over stable of U(stable) - U(opt)",
        max_of(stable.iter().map(|&s| m.perf_utility(s) - opt.utility)),
        Relation::Le,
        0.0,
    );
    Ok(())
}

fn high_wage_equity(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cfg = preset("fairness-linear", opts)?;
    let tg = cfg.two_group_market()?;
    let grid = cfg.grid_n();
    let d = tg.market.diagnose(grid);
    let eps = d.epsilon_sep;
    rec.check("wage vs M_G / (1 - eps)", tg.market.params.wage, Relation::Gt, d.m_g / (1.0 - eps));
    let Some(c) = d.lipschitz_c else {
        rec.notes.push("error: Lipschitz constant not evaluable".into());
        return Ok(());
    };
    rec.notes.push(format!("c = {c}, eps = {eps}"));
    let stable_gap = max_of(tg.stable_pairs(grid).into_iter().map(|p| tg.equity_report(p, DEFAULT_REPORT_TOL).gap));
    rec.check("largest stable gap vs 1 - c", stable_gap, Relation::Gt, 1.0 - c);
    let optimal_gap = max_of(tg.optimal_pairs(grid).into_iter().map(|p| tg.equity_report(p, DEFAULT_REPORT_TOL).gap));
    rec.check("largest optimal gap vs eps", optimal_gap, Relation::Lt, eps);
    Ok(())
}

fn low_wage_equity(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cfg = preset("thm34-demo", opts)?;
    let tg = cfg.two_group_market()?;
    let grid = cfg.grid_n();
    let d = tg.market.diagnose(grid);
    rec.check(
        "low-wage equity hypotheses hold",
        f64::from(u8::from(d.flags.low_wage_equity.passed())),
        Relation::Eq,
        1.0,
    );
    let stable_gap = max_of(tg.stable_pairs(grid).into_iter().map(|p| tg.equity_report(p, DEFAULT_REPORT_TOL).gap));
    rec.check("largest stable gap", stable_gap, Relation::Gt, 1e-3);
    let opt = tg.market.find_optimal(grid);
    rec.check("optimum is unique", f64::from(u8::from(opt.unique)), Relation::Eq, 1.0);
    let optimal_gap = max_of(tg.optimal_pairs(grid).into_iter().map(|p| tg.equity_report(p, DEFAULT_REPORT_TOL).gap));
    rec.check("largest optimal gap", optimal_gap, Relation::Lt, 1e-6);
    Ok(())
}

fn stable_residuals(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    rec.check("retraining step tolerance", opts.tolerances.fixed_point_tol, Relation::Le, 1e-3);
    let (mut residual, mut last_step, mut unconverged) = (0.0_f64, 0.0_f64, 0usize);
    for id in ["thm31-demo", "thm32-demo", "fairness-linear", "thm34-demo"] {
        let cfg = preset(id, opts)?;
        let m = cfg.coate_loury_market()?;
        for s in m.enumerate_stable(cfg.grid_n()) {
            residual = residual.max(m.stable_residual(s));
        }
        for k in 0..RRM_STARTS {
            let trace = m.rrm_run((k as f64 + 0.5) / RRM_STARTS as f64, 200);
            let t = &trace.trajectory;
            if trace.converged {
                last_step = last_step.max((t[t.len() - 1] - t[t.len() - 2]).abs());
                residual = residual.max(m.stable_residual(trace.last()));
            } else {
                unconverged += 1;
            }
        }
    }
    rec.notes.push(format!("{unconverged} binary-market retraining runs hit the iteration cap"));
    rec.check("largest stable residual", residual, Relation::Lt, 5e-3);
    rec.check("largest final retraining step", last_step, Relation::Lt, 1e-3);
    Ok(())
}

/// The flat-wage polynomial market `u(y) = a y - 1`.
fn linear_flat(a: f64, w: f64, c: f64) -> MarketSpec {
    MarketSpec {
        skill: SkillSpec::Uniform { lo: 0.0, hi: 1.0 },
        kernel: KernelFamily::Polynomial,
        utility: UtilitySpec {
            base: BaseUtility::Linear { slope: a, intercept: -1.0 },
            production: Production::Identity,
        },
        wage: WageStructure::Flat { wage: w },
        cost: CostSpec::quadratic(c),
        lambda_maj: 1.0,
    }
}

const BINS: usize = 64;

fn threshold_dominance(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let tol = opts.tolerances;
    let market = ContinuousMarket::with_tolerances(linear_flat(2.0, 1.0, 5.0), tol)?;
    let respond = PolicyPair::uniform(0.4);
    let base = market.spec().utility.base;
    let oracle_tol = Tolerances { quad_tol: 1e-10, ..tol };

    // Signal mass of bin [lo, hi] for the kernel (y + 1) x^y is
    // hi^(y+1) - lo^(y+1).
    let mut coef = vec![0.0; BINS];
    for (b, c) in coef.iter_mut().enumerate() {
        let (lo, hi) = (b as f64 / BINS as f64, (b + 1) as f64 / BINS as f64);
        *c = integrate_best_effort(
            |y| {
                let s = market.worker_best_response(Group::Maj, respond.theta_maj, y);
                base.eval(s) * (hi.powf(s + 1.0) - lo.powf(s + 1.0))
            },
            Interval::UNIT,
            &[],
            &oracle_tol,
        )?;
    }

    // Coordinate ascent over per-bin hire probabilities on an 11-level grid.
    let mut f = vec![0.5; BINS];
    loop {
        let mut improved = false;
        for b in 0..BINS {
            let best = (0..=10)
                .map(|k| k as f64 / 10.0)
                .fold(f[b], |acc, level| if level * coef[b] > acc * coef[b] { level } else { acc });
            if best != f[b] {
                f[b] = best;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let randomized: f64 = f.iter().zip(&coef).map(|(p, c)| p * c).sum();

    let u = |t: f64| market.decoupled_utility(PolicyPair::uniform(t), respond);
    let n = 10_000;
    let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let v = u(t);
        if v > best {
            (arg, best) = (t, v);
        }
    }
    let (lo, hi) = ((arg - 1.0 / n as f64).max(0.0), (arg + 1.0 / n as f64).min(1.0));
    let refined = golden_section_max(u, lo, hi, 1e-12).1.max(best);
    rec.notes.push(format!("threshold {refined}, randomized {randomized}"));
    rec.check("best threshold - best randomized", refined - randomized, Relation::Ge, -1e-6);
    Ok(())
}

fn gaussian_market(tol: Tolerances) -> Result<ContinuousMarket> {
    let spec = MarketSpec {
        skill: SkillSpec::Gaussian { mean: 0.0, sd: 1.0 },
        kernel: KernelFamily::Gaussian { sd: 1.0 },
        utility: UtilitySpec {
            base: BaseUtility::Linear {
                slope: 1.0,
                intercept: 0.0,
            },
            production: Production::Identity,
        },
        wage: WageStructure::Nash,
        cost: CostSpec {
            kind: CostKind::Quadratic,
            scale: 20.0,
            scale_maj: None,
            scale_min: None,
        },
        lambda_maj: 1.0,
    };
    ContinuousMarket::with_tolerances(spec, tol)
}

fn nash_wage(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let m = gaussian_market(opts.tolerances)?;
    let theta = -1.0;
    let mut err = 0.0_f64;
    for i in 0..50 {
        let x = theta + 5.0 * i as f64 / 49.0;
        // Posterior mean of y given x for y ~ N(0, 1), x | y ~ N(y, 1).
        err = err.max((m.nash_wage(theta, x)? - x / 2.0).abs());
    }
    rec.check("max |wage(x) - x/2| over x >= theta", err, Relation::Lt, 1e-3);
    let residual = max_of([-1.0, 0.0, 0.7].into_iter().map(|t| m.zero_profit_residual(PolicyPair::uniform(t)).abs()));
    rec.check("max |E[gamma u] - E[w]|", residual, Relation::Lt, 1e-3);
    Ok(())
}

const PROBES: [f64; 12] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.55, 0.6, 0.65, 0.7, 0.8, 0.9];

fn gradient_oracle(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let market = ContinuousMarket::with_tolerances(linear_flat(2.0, 1.0, 5.0), opts.tolerances)?;
    let model = ResponseModel::from_market(&market)?;
    let loss = EmployerLoss {
        base: market.spec().utility.base,
    };
    let (n, h) = (10_000, 1e-4);
    let root = RngStream::new(opts.seed, 1);
    let mut worst = 0.0_f64;
    for (k, &theta) in PROBES.iter().enumerate() {
        let loss_at = |t: f64| Ok::<_, crate::Error>(model.responder(SmoothPolicy::new(t, 0.02)?).loss_quadrature(&loss));
        let fd = (loss_at(theta + h)? - loss_at(theta - h)?) / (2.0 * h);
        let stream = root.child(k as u64);
        let mut rng = stream.child(u64::MAX).rng();
        let ys: Vec<f64> = (0..n).map(|i| (i as f64 + rng.random::<f64>()) / n as f64).collect();
        let est = model.responder(SmoothPolicy::new(theta, 0.02)?).reinforce_grad(&loss, &ys, 16, stream)?;
        let rel = (est.total - fd).abs() / (fd.abs() + 1e-6);
        rec.notes.push(format!("theta {theta}: estimate {} finite difference {fd}", est.total));
        worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
    }
    rec.check("largest relative error", worst, Relation::Lt, 0.05);
    Ok(())
}

fn sgd_end_to_end(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let cfg = preset("sgd-a2w1c5", opts)?;
    let market = cfg.continuous_market()?;
    let domain = market.policy_domain();
    let n = 2000;
    let (mut arg, mut best) = (domain.lo(), f64::NEG_INFINITY);
    for t in domain.grid(n) {
        let v = market.employer_perf_utility(PolicyPair::uniform(t));
        if v > best {
            (arg, best) = (t, v);
        }
    }
    rec.notes.push(format!("grid optimum {arg} with utility {best}"));

    let trials = run_sgd(&cfg)?;
    let finals = |mode: SgdMode| {
        let last: Vec<(f64, f64)> = trials
            .iter()
            .filter(|t| t.mode == mode)
            .filter_map(|t| Some((t.steps.last()?.theta, *t.utility.last()?)))
            .collect();
        let k = last.len().max(1) as f64;
        (last.iter().map(|p| p.0).sum::<f64>() / k, last.iter().map(|p| p.1).sum::<f64>() / k)
    };
    let (theta_perf, u_perf) = finals(SgdMode::Performative);
    let (_, u_naive) = finals(SgdMode::Naive);
    rec.check("|mean final theta - optimum|", (theta_perf - arg).abs(), Relation::Lt, 0.05);
    rec.check("mean final utility, performative - naive", u_perf - u_naive, Relation::Ge, 0.0);
    Ok(())
}

fn pair_rows(rows: &[SweepRow]) -> Vec<(&SweepRow, &SweepRow)> {
    rows.chunks(2)
        .filter_map(|c| match c {
            [a, b] if a.policy == PolicyKind::Stable && b.policy == PolicyKind::Optimal => Some((a, b)),
            _ => None,
        })
        .collect()
}

fn linear_orderings(opts: &VerifyOptions, rec: &mut Recorder) -> Result<()> {
    let (mut q_margin, mut w_margin, mut failed) = (f64::INFINITY, f64::INFINITY, 0usize);
    for id in ["linear-flat", "linear-flat-c"] {
        let cfg = preset(id, opts)?;
        let sweep = cfg.sweep.clone().unwrap_or_default();
        let rows = run_sweep(&cfg, sweep.axis, &sweep.values)?;
        for (stable, optimal) in pair_rows(&rows) {
            let label = format!("{id} {}={}", sweep.axis.name(), stable.value);
            let (Some(s), Some(o)) = (&stable.point, &optimal.point) else {
                failed += 1;
                rec.notes.push(format!("{label}: {}", stable.error.clone().or(optimal.error.clone()).unwrap_or_default()));
                continue;
            };
            let dq = o.proportion_qualified - s.proportion_qualified;
            let dw = s.worker_welfare - o.worker_welfare;
            if dq < 0.0 || dw < 0.0 || !s.converged {
                rec.notes.push(format!(
                    "{label}: qualified optimal {} stable {}, welfare stable {} optimal {}, converged {}",
                    o.proportion_qualified, s.proportion_qualified, s.worker_welfare, o.worker_welfare, s.converged
                ));
            }
            failed += usize::from(!s.converged);
            q_margin = q_margin.min(dq);
            w_margin = w_margin.min(dw);
        }
    }
    rec.check("rows without a converged solution", failed as f64, Relation::Eq, 0.0);
    rec.check("min qualified(optimal) - qualified(stable)", q_margin, Relation::Ge, 0.0);
    rec.check("min welfare(stable) - welfare(optimal)", w_margin, Relation::Ge, 0.0);
    Ok(())
}
