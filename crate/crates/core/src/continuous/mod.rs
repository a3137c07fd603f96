//! Continuous-skill labor market with strategic skill improvement.
//!
//! Workers of skill `y` pick `y' >= y` to maximize expected wage income under
//! the deployed threshold minus an improvement cost. The employer values a
//! hire at `gamma(H) u(y)`, where `H` is the pooled hire probability at the
//! worker's post-response skill.

mod equilibrium;
mod kernel;
mod nash;
mod sweep;
mod utility;

pub use equilibrium::{OptimalPair, StableSearch};
pub use kernel::{KernelFamily, SignalKernel};
pub use sweep::{sweep, Metric, PointReport, PolicyKind, SweepRow, SweepSettings};
pub use utility::{BaseUtility, Production, UtilitySpec};

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{catmull_rom, kronrod_rule, maximize_1d, Density, Interval, Tolerances};
use crate::policy::{Group, PolicyPair};
use nash::NashTable;

/// Truncation of Gaussian skill densities, in standard deviations.
pub const SKILL_TRUNCATION: f64 = 6.0;
/// Half-width of Gaussian signal domains, in combined standard deviations.
pub const SIGNAL_TRUNCATION: f64 = 8.0;

const PROFILE_GRID: usize = 128;
const EXPECTATION_PANELS: usize = 16;
const INCENTIVE_TABLE: usize = 1024;

fn default_sd() -> f64 {
    1.0
}

fn default_hi() -> f64 {
    1.0
}

fn default_lambda() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

/// Base skill distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SkillSpec {
    Uniform {
        #[serde(default)]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
    /// Truncated to six standard deviations.
    Gaussian {
        #[serde(default)]
        mean: f64,
        #[serde(default = "default_sd")]
        sd: f64,
    },
}

impl SkillSpec {
    pub fn density(&self) -> Density {
        match *self {
            SkillSpec::Uniform { lo, hi } => Density::Uniform { lo, hi },
            SkillSpec::Gaussian { mean, sd } => Density::Gaussian {
                mean,
                sd,
                truncation: SKILL_TRUNCATION,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WageStructure {
    Flat { wage: f64 },
    /// Zero-profit wages: the posterior mean of `u` given the signal.
    Nash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    /// `scale / 2 * (y' - y)^2`.
    Quadratic,
    /// `scale * (y' - y)_+`.
    Hinge,
}

/// Improvement cost, with optional per-group scales overriding `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub kind: CostKind,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_maj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_min: Option<f64>,
}

impl CostSpec {
    pub fn quadratic(scale: f64) -> Self {
        Self {
            kind: CostKind::Quadratic,
            scale,
            scale_maj: None,
            scale_min: None,
        }
    }

    pub fn scale_for(&self, group: Group) -> f64 {
        match group {
            Group::Maj => self.scale_maj.unwrap_or(self.scale),
            Group::Min => self.scale_min.unwrap_or(self.scale),
        }
    }

    pub fn eval(&self, group: Group, y_new: f64, y: f64) -> f64 {
        let c = self.scale_for(group);
        let d = y_new - y;
        match self.kind {
            CostKind::Quadratic => 0.5 * c * d * d,
            CostKind::Hinge => c * d.max(0.0),
        }
    }

    /// `d^2/dy'^2 c(y', y)` away from `y' = y`.
    pub fn second_derivative(&self, group: Group) -> f64 {
        match self.kind {
            CostKind::Quadratic => self.scale_for(group),
            CostKind::Hinge => 0.0,
        }
    }
}

/// Declarative description of a continuous market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub skill: SkillSpec,
    pub kernel: KernelFamily,
    pub utility: UtilitySpec,
    pub wage: WageStructure,
    pub cost: CostSpec,
    #[serde(default = "default_lambda")]
    pub lambda_maj: f64,
}

impl MarketSpec {
    pub fn validate(&self) -> Result<()> {
        let cfg = |key: &str, msg: String| Err(Error::config(key, msg));
        let skill = self.skill.density();
        skill.validate().map_err(|e| Error::config("continuous.skill", e.to_string()))?;
        match self.kernel {
            KernelFamily::Polynomial => {
                if skill.support().lo() <= -1.0 {
                    return cfg("continuous.kernel", "polynomial kernel needs skills above -1".into());
                }
            }
            KernelFamily::Gaussian { sd } => {
                if !(sd.is_finite() && sd > 0.0) {
                    return cfg("continuous.kernel.sd", format!("must be positive, got {sd}"));
                }
            }
        }
        self.utility.validate().map_err(|e| Error::config("continuous.utility", e.to_string()))?;
        if let WageStructure::Flat { wage } = self.wage {
            if !(wage.is_finite() && wage >= 0.0) {
                return cfg("continuous.wage.wage", format!("must be nonnegative, got {wage}"));
            }
        }
        for (key, group) in [("continuous.cost.scale_maj", Group::Maj), ("continuous.cost.scale_min", Group::Min)] {
            let c = self.cost.scale_for(group);
            if !(c.is_finite() && c > 0.0) {
                return cfg(key, format!("cost scale must be positive, got {c}"));
            }
        }
        if !(self.lambda_maj > 0.0 && self.lambda_maj <= 1.0) {
            return cfg("continuous.lambda_maj", format!("must lie in (0, 1], got {}", self.lambda_maj));
        }
        Ok(())
    }
}

/// Post-response structure of one group under one threshold.
#[derive(Debug)]
struct Profile {
    qualified: f64,
    /// `(y, weight, Y+(y))` on a fixed rule split where the response jumps
    /// or qualification changes.
    nodes: Vec<(f64, f64, f64)>,
}

enum Incentive {
    Flat(f64),
    Tabulated(Rc<Vec<f64>>),
}

type ResponseKey = (u64, u64, u64);

/// A continuous market ready for evaluation. Worker responses are memoized,
/// so a market value should not be shared across threads; clone it instead.
pub struct ContinuousMarket {
    spec: MarketSpec,
    skill: Density,
    kernel: SignalKernel,
    response_domain: Interval,
    tol: Tolerances,
    response_grid: usize,
    nash: Option<NashTable>,
    /// Per response-grid skill, tail integrals of the Nash wage.
    wage_tails: Rc<Vec<Vec<f64>>>,
    responses: RefCell<HashMap<ResponseKey, f64>>,
    profiles: RefCell<HashMap<(u64, u64), Rc<Profile>>>,
    incentive_tables: RefCell<HashMap<u64, Rc<Vec<f64>>>>,
}

impl Clone for ContinuousMarket {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec,
            skill: self.skill,
            kernel: self.kernel,
            response_domain: self.response_domain,
            tol: self.tol,
            response_grid: self.response_grid,
            nash: self.nash.clone(),
            wage_tails: self.wage_tails.clone(),
            responses: RefCell::default(),
            profiles: RefCell::default(),
            incentive_tables: RefCell::default(),
        }
    }
}

impl std::fmt::Debug for ContinuousMarket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuousMarket").field("spec", &self.spec).finish()
    }
}

impl ContinuousMarket {
    pub fn new(spec: MarketSpec) -> Result<Self> {
        Self::with_tolerances(spec, Tolerances::default())
    }

    pub fn with_tolerances(spec: MarketSpec, tol: Tolerances) -> Result<Self> {
        spec.validate()?;
        tol.validate()?;
        let skill = spec.skill.density();
        let support = skill.support();
        let kernel = match spec.kernel {
            KernelFamily::Polynomial => SignalKernel::polynomial(),
            KernelFamily::Gaussian { sd } => {
                let skill_sd = match spec.skill {
                    SkillSpec::Gaussian { sd, .. } => sd,
                    SkillSpec::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
                };
                let half = SIGNAL_TRUNCATION * (sd * sd + skill_sd * skill_sd).sqrt();
                let center = skill.mean();
                SignalKernel::gaussian(sd, Interval::new(center - half, center + half)?)
            }
        };
        let response_domain = Interval::new(support.lo(), support.hi() + support.width())?;
        let nash = match spec.wage {
            WageStructure::Nash => Some(NashTable::build(&kernel, &skill, &spec.utility.base, &tol)?),
            WageStructure::Flat { .. } => None,
        };
        let wage_tails = match &nash {
            Some(table) => response_domain.grid(INCENTIVE_TABLE).map(|y| table.tail(&kernel, y)).collect(),
            None => Vec::new(),
        };
        Ok(Self {
            spec,
            skill,
            kernel,
            response_domain,
            tol,
            response_grid: 64,
            nash,
            wage_tails: Rc::new(wage_tails),
            responses: RefCell::default(),
            profiles: RefCell::default(),
            incentive_tables: RefCell::default(),
        })
    }

    pub fn spec(&self) -> &MarketSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &SignalKernel {
        &self.kernel
    }

    pub fn skill(&self) -> &Density {
        &self.skill
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Thresholds range over the signal domain.
    pub fn policy_domain(&self) -> Interval {
        self.kernel.domain
    }

    /// Candidate post-response skills: the support widened by its own width.
    pub fn response_domain(&self) -> Interval {
        self.response_domain
    }

    pub fn lambda(&self) -> f64 {
        self.spec.lambda_maj
    }

    /// Groups with positive mass and their weights.
    pub fn groups(&self) -> Vec<(Group, f64)> {
        let l = self.spec.lambda_maj;
        if l >= 1.0 {
            vec![(Group::Maj, 1.0)]
        } else {
            vec![(Group::Maj, l), (Group::Min, 1.0 - l)]
        }
    }

    fn weight(&self, group: Group) -> f64 {
        match group {
            Group::Maj => self.spec.lambda_maj,
            Group::Min => 1.0 - self.spec.lambda_maj,
        }
    }

    /// `(H^Maj(y), H^Min(y), H_f(y))` for threshold policies.
    pub fn hire_prob(&self, pair: PolicyPair, y: f64) -> (f64, f64, f64) {
        let h_maj = self.kernel.sf(pair.theta_maj, y);
        let h_min = self.kernel.sf(pair.theta_min, y);
        let l = self.spec.lambda_maj;
        (h_maj, h_min, l * h_maj + (1.0 - l) * h_min)
    }

    /// Wage paid to a hired worker with signal `x` under Nash wages.
    pub fn nash_wage(&self, theta: f64, x: f64) -> Result<f64> {
        if x < theta {
            return Ok(0.0);
        }
        let gamma = self.spec.utility.production.eval(1.0);
        Ok(gamma * nash::posterior_mean(x, &self.kernel, &self.skill, &self.spec.utility.base, &self.tol)?)
    }

    fn nash_incentive_direct(&self, table: &NashTable, theta: f64, y: f64) -> f64 {
        table.incentive(&self.kernel, &table.tail(&self.kernel, y), theta, y)
    }

    fn incentive_source(&self, theta: f64) -> Incentive {
        match (&self.spec.wage, &self.nash) {
            (WageStructure::Flat { wage }, _) => Incentive::Flat(*wage),
            (WageStructure::Nash, Some(table)) => {
                let key = theta.to_bits();
                if let Some(t) = self.incentive_tables.borrow().get(&key) {
                    return Incentive::Tabulated(t.clone());
                }
                let values: Vec<f64> = self
                    .response_domain
                    .grid(INCENTIVE_TABLE)
                    .zip(self.wage_tails.iter())
                    .map(|(y, tail)| table.incentive(&self.kernel, tail, theta, y))
                    .collect();
                let values = Rc::new(values);
                self.incentive_tables.borrow_mut().insert(key, values.clone());
                Incentive::Tabulated(values)
            }
            (WageStructure::Nash, None) => unreachable!("nash table built at construction"),
        }
    }

    fn incentive_from(&self, source: &Incentive, theta: f64, y: f64) -> f64 {
        match source {
            Incentive::Flat(w) => w * self.kernel.sf(theta, y),
            Incentive::Tabulated(values) => catmull_rom(values, self.response_domain, y),
        }
    }

    /// Expected wage income `int w(x) 1{x >= theta} phi(x | y) dx` at skill `y`.
    pub fn incentive(&self, theta: f64, y: f64) -> f64 {
        match (&self.spec.wage, &self.nash) {
            (WageStructure::Nash, Some(table)) if !self.response_domain.contains(y) => {
                self.nash_incentive_direct(table, theta, y)
            }
            _ => self.incentive_from(&self.incentive_source(theta), theta, y),
        }
    }

    /// Worker payoff from moving to `y_new`.
    pub fn worker_objective(&self, group: Group, theta: f64, y: f64, y_new: f64) -> f64 {
        self.incentive(theta, y_new) - self.spec.cost.eval(group, y_new, y)
    }

    /// `Y+(y)`: the smallest maximizer of the worker objective on
    /// `[y, response_domain.hi]`.
    pub fn worker_best_response(&self, group: Group, theta: f64, y: f64) -> f64 {
        let key = (self.spec.cost.scale_for(group).to_bits(), theta.to_bits(), y.to_bits());
        if let Some(&v) = self.responses.borrow().get(&key) {
            return v;
        }
        let hi = self.response_domain.hi();
        let v = match Interval::new(y, hi) {
            Ok(domain) => {
                let source = self.incentive_source(theta);
                let tol = Tolerances {
                    opt_tol: 1e-10,
                    ..self.tol
                };
                let objective = |yn: f64| self.incentive_from(&source, theta, yn) - self.spec.cost.eval(group, yn, y);
                maximize_1d(objective, domain, self.response_grid, &tol).0
            }
            Err(_) => y,
        };
        self.responses.borrow_mut().insert(key, v);
        v
    }

    fn profile(&self, group: Group, theta: f64) -> Rc<Profile> {
        let key = (self.spec.cost.scale_for(group).to_bits(), theta.to_bits());
        if let Some(p) = self.profiles.borrow().get(&key) {
            return p.clone();
        }
        let p = Rc::new(self.build_profile(group, theta));
        self.profiles.borrow_mut().insert(key, p.clone());
        p
    }

    fn qualifies(&self, theta: f64, s: f64) -> bool {
        self.spec.utility.base.eval(s) > 0.0 && self.kernel.sf(theta, s) > 0.0
    }

    fn build_profile(&self, group: Group, theta: f64) -> Profile {
        let support = self.skill.support();
        let resp = |y: f64| self.worker_best_response(group, theta, y);
        let ys: Vec<f64> = support.grid(PROFILE_GRID).collect();
        let ss: Vec<f64> = ys.iter().map(|&y| resp(y)).collect();
        let mut breaks = Vec::new();

        for i in 0..PROFILE_GRID {
            let (mut a, mut b) = (ys[i], ys[i + 1]);
            let (mut sa, mut sb) = (ss[i], ss[i + 1]);
            if ((sb - sa) - (b - a)).abs() <= 0.25 * (b - a) {
                continue;
            }
            // Narrow onto the half with the larger excess change.
            for _ in 0..48 {
                let m = 0.5 * (a + b);
                let sm = resp(m);
                if ((sm - sa) - (m - a)).abs() >= ((sb - sm) - (b - m)).abs() {
                    b = m;
                    sb = sm;
                } else {
                    a = m;
                    sa = sm;
                }
            }
            if ((sb - sa) - (b - a)).abs() > 1e-6 {
                breaks.push(0.5 * (a + b));
            }
        }

        let q: Vec<bool> = ys.iter().zip(&ss).map(|(_, &s)| self.qualifies(theta, s)).collect();
        let mut boundaries = Vec::new();
        for i in 0..PROFILE_GRID {
            if q[i] == q[i + 1] {
                continue;
            }
            let (mut a, mut b) = (ys[i], ys[i + 1]);
            for _ in 0..52 {
                let m = 0.5 * (a + b);
                if self.qualifies(theta, resp(m)) == q[i] {
                    a = m;
                } else {
                    b = m;
                }
            }
            boundaries.push(0.5 * (a + b));
        }

        let mut edges = vec![support.lo()];
        edges.extend(boundaries.iter().copied());
        edges.push(support.hi());
        let mut qualified = 0.0;
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if w[1] > w[0] && self.qualifies(theta, resp(mid)) {
                qualified += self.skill.cdf(w[1]) - self.skill.cdf(w[0]);
            }
        }

        breaks.extend(boundaries);
        breaks.sort_by(f64::total_cmp);
        let nodes = self.rule(&breaks).into_iter().map(|(y, w)| (y, w, resp(y))).collect();
        Profile { qualified, nodes }
    }

    /// Composite 15-point rule for `E_y`, with panels split at `breaks`.
    fn rule(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        let support = self.skill.support();
        let mut cuts: Vec<f64> = support.grid(EXPECTATION_PANELS).collect();
        cuts.extend(breaks.iter().copied().filter(|b| support.contains(*b)));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .flat_map(|w| kronrod_rule(w[0], w[1]))
            .map(|(y, w)| (y, w * self.skill.pdf(y)))
            .collect()
    }

    /// `E_y[f(y)]` over the base skill density, split at `breaks`.
    fn expect<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        self.rule(breaks).into_iter().map(|(y, w)| w * f(y)).sum()
    }

    /// `E_y[f(y, Y+(y))]` for one group under threshold `theta`.
    fn expect_response<F: FnMut(f64, f64) -> f64>(&self, group: Group, theta: f64, mut f: F) -> f64 {
        self.profile(group, theta).nodes.iter().map(|&(y, w, s)| w * f(y, s)).sum()
    }

    /// Employer utility when `deploy` is used for hiring but workers have
    /// responded to `respond`.
    pub fn decoupled_utility(&self, deploy: PolicyPair, respond: PolicyPair) -> f64 {
        let production = self.spec.utility.production;
        let base = self.spec.utility.base;
        let mut total = 0.0;
        for (group, weight) in self.groups() {
            let r = respond.get(group);
            let d = deploy.get(group);
            let term = self.expect_response(group, r, |_, s| {
                let h = self.kernel.sf(d, s);
                if h == 0.0 {
                    return 0.0;
                }
                let ratio = if production.is_identity() {
                    1.0
                } else {
                    production.ratio(self.hire_prob(deploy, s).2)
                };
                base.eval(s) * h * ratio
            });
            total += weight * term;
        }
        total
    }

    pub fn employer_perf_utility(&self, pair: PolicyPair) -> f64 {
        self.decoupled_utility(pair, pair)
    }

    /// Employer utility with workers held at their base skill.
    pub fn static_utility(&self, pair: PolicyPair) -> f64 {
        let production = self.spec.utility.production;
        let base = self.spec.utility.base;
        self.expect(&base.breaks(), |y| production.eval(self.hire_prob(pair, y).2) * base.eval(y))
    }

    pub fn welfare_by_group(&self, pair: PolicyPair) -> Vec<(Group, f64)> {
        self.groups()
            .into_iter()
            .map(|(group, _)| {
                let theta = pair.get(group);
                let w = self.expect_response(group, theta, |y, s| {
                    self.incentive(theta, s) - self.spec.cost.eval(group, s, y)
                });
                (group, w)
            })
            .collect()
    }

    pub fn aggregate_worker_welfare(&self, pair: PolicyPair) -> f64 {
        self.welfare_by_group(pair)
            .into_iter()
            .map(|(g, w)| self.weight(g) * w)
            .sum()
    }

    /// Welfare if every worker stayed at their base skill.
    pub fn static_welfare(&self, pair: PolicyPair) -> f64 {
        self.groups()
            .into_iter()
            .map(|(group, weight)| {
                let theta = pair.get(group);
                weight * self.expect(&[], |y| self.incentive(theta, y))
            })
            .sum()
    }

    pub fn qualified_by_group(&self, pair: PolicyPair) -> Vec<(Group, f64)> {
        self.groups()
            .into_iter()
            .map(|(group, _)| (group, self.profile(group, pair.get(group)).qualified))
            .collect()
    }

    /// Share of workers whose post-response utility to the employer is positive.
    pub fn proportion_qualified(&self, pair: PolicyPair) -> f64 {
        self.qualified_by_group(pair)
            .into_iter()
            .map(|(g, q)| self.weight(g) * q)
            .sum()
    }

    /// `E[gamma(H_f(y)) u(y)] - E[w]` before any response. The first term is
    /// an expectation over skills, the second an integral over signals.
    pub fn zero_profit_residual(&self, pair: PolicyPair) -> f64 {
        let production_term = self.static_utility(pair);
        let wage_term: f64 = match (&self.spec.wage, &self.nash) {
            (WageStructure::Flat { wage }, _) => self
                .groups()
                .into_iter()
                .map(|(g, weight)| weight * wage * self.expect(&[], |y| self.kernel.sf(pair.get(g), y)))
                .sum(),
            (WageStructure::Nash, Some(table)) => {
                let gamma_one = self.spec.utility.production.eval(1.0);
                self.groups()
                    .into_iter()
                    .map(|(g, weight)| weight * gamma_one * table.expected_wage(pair.get(g)))
                    .sum()
            }
            (WageStructure::Nash, None) => unreachable!("nash table built at construction"),
        };
        production_term - wage_term
    }

    /// Drops memoized responses, e.g. between unrelated evaluations.
    pub fn clear_cache(&self) {
        self.responses.borrow_mut().clear();
        self.profiles.borrow_mut().clear();
        self.incentive_tables.borrow_mut().clear();
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The flat-wage polynomial market with `u(y) = a y - 1`.
    pub fn linear_flat(a: f64, w: f64, c: f64) -> MarketSpec {
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

    /// The Gaussian market with zero-profit wages and `u(y) = slope * y`.
    pub fn gaussian_nash(slope: f64, alpha: f64, c_maj: f64, c_min: f64, lambda: f64) -> MarketSpec {
        MarketSpec {
            skill: SkillSpec::Gaussian { mean: 0.0, sd: 1.0 },
            kernel: KernelFamily::Gaussian { sd: 1.0 },
            utility: UtilitySpec {
                base: BaseUtility::Linear { slope, intercept: 0.0 },
                production: Production::Power { alpha },
            },
            wage: WageStructure::Nash,
            cost: CostSpec {
                kind: CostKind::Quadratic,
                scale: c_maj,
                scale_maj: Some(c_maj),
                scale_min: Some(c_min),
            },
            lambda_maj: lambda,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn hire_probabilities() {
        let m = ContinuousMarket::new(linear_flat(2.0, 1.0, 5.0)).unwrap();
        let (a, b, pooled) = m.hire_prob(PolicyPair::new(0.5, 0.0), 1.0);
        assert!((a - 0.75).abs() < 1e-15);
        assert_eq!(b, 1.0);
        assert_eq!(pooled, a);
        assert!((m.incentive(0.5, 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn best_response_matches_dense_scan() {
        let m = ContinuousMarket::new(linear_flat(2.0, 1.0, 5.0)).unwrap();
        for theta in [0.2, 0.42, 0.7] {
            for y in [0.0, 0.25, 0.5, 0.9] {
                let fast = m.worker_best_response(Group::Maj, theta, y);
                let hi = m.response_domain().hi();
                let (mut best, mut arg) = (f64::NEG_INFINITY, y);
                for i in 0..=10_000 {
                    let yn = y + (hi - y) * i as f64 / 10_000.0;
                    let v = m.worker_objective(Group::Maj, theta, y, yn);
                    if v > best {
                        best = v;
                        arg = yn;
                    }
                }
                assert!((fast - arg).abs() < 1e-3, "theta={theta} y={y}: {fast} vs {arg}");
                assert!(fast >= y);
            }
        }
    }

    #[test]
    fn zero_wage_is_static() {
        let m = ContinuousMarket::new(linear_flat(2.0, 0.0, 5.0)).unwrap();
        let pair = PolicyPair::uniform(0.4);
        assert_eq!(m.worker_best_response(Group::Maj, 0.4, 0.3), 0.3);
        assert!((m.employer_perf_utility(pair) - m.static_utility(pair)).abs() < 1e-9);
        assert!(m.aggregate_worker_welfare(pair).abs() < 1e-12);
    }

    #[test]
    fn hire_nobody_pays_nothing() {
        let m = ContinuousMarket::new(linear_flat(2.0, 1.0, 5.0)).unwrap();
        let pair = PolicyPair::uniform(1.0);
        assert_eq!(m.aggregate_worker_welfare(pair), 0.0);
        assert_eq!(m.employer_perf_utility(pair), 0.0);
    }

    #[test]
    fn qualified_matches_sign_analysis() {
        let m = ContinuousMarket::new(linear_flat(2.0, 1.0, 5.0)).unwrap();
        let theta = 0.4;
        let n = 20_000;
        let brute = (0..n)
            .filter(|&i| {
                let y = (i as f64 + 0.5) / n as f64;
                m.worker_best_response(Group::Maj, theta, y) > 0.5
            })
            .count() as f64
            / n as f64;
        let q = m.proportion_qualified(PolicyPair::uniform(theta));
        assert!((q - brute).abs() < 1e-3, "{q} vs {brute}");
    }

    #[test]
    fn welfare_beats_staying_put() {
        let m = ContinuousMarket::new(linear_flat(2.0, 1.0, 5.0)).unwrap();
        for t in [0.1, 0.4, 0.8] {
            let p = PolicyPair::uniform(t);
            assert!(m.aggregate_worker_welfare(p) >= m.static_welfare(p) - 1e-9);
        }
    }

    #[test]
    fn nash_wage_closed_form() {
        let m = ContinuousMarket::new(gaussian_nash(1.0, 1.0, 20.0, 20.0, 1.0)).unwrap();
        assert!((m.nash_wage(0.0, 0.8).unwrap() - 0.4).abs() < 1e-6);
        assert_eq!(m.nash_wage(0.5, 0.3).unwrap(), 0.0);
        for i in 0..50 {
            let x = -1.0 + 5.0 * i as f64 / 49.0;
            assert!((m.nash_wage(-1.0, x).unwrap() - x / 2.0).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_profit_residual_vanishes_for_linear_production() {
        let m = ContinuousMarket::new(gaussian_nash(1.0, 1.0, 20.0, 20.0, 1.0)).unwrap();
        for t in [-1.0, 0.0, 0.7] {
            let r = m.zero_profit_residual(PolicyPair::uniform(t));
            assert!(r.abs() < 1e-3, "theta {t}: {r}");
        }
        let hi = m.policy_domain().hi();
        assert!(m.zero_profit_residual(PolicyPair::uniform(hi)).abs() < 1e-12);
    }
}
