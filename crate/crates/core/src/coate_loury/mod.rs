//! The binary-skill Coate-Loury hiring market.
//!
//! A worker invests in skill iff its cost is below the wage gain
//! `w * (TPR - FPR)` from being skilled, so the skilled share responds to the
//! employer's threshold through the cost CDF `G`.

mod diagnostics;

pub use diagnostics::{Flag, TheoremDiagnostics, TheoremFlags};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_roots_1d, integrate, maximize_1d, near_optimal_peaks, Density, Interval, Tolerances};

/// Default grid for best responses and other threshold scans.
pub const DEFAULT_GRID: usize = 512;

/// Residual below which a point counts as a fixed point of the RRM map.
pub const STABLE_RESIDUAL: f64 = 5e-3;

/// Signal densities of skilled and unskilled workers on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalModel {
    skilled: Density,
    unskilled: Density,
}

impl SignalModel {
    /// Validates normalization and the monotone likelihood ratio on a
    /// 512-point grid.
    pub fn new(skilled: Density, unskilled: Density) -> Result<Self> {
        for (name, d) in [("skilled", skilled), ("unskilled", unskilled)] {
            d.validate()?;
            if d.support() != Interval::UNIT {
                return Err(Error::InvalidArgument(format!("{name} signal density must live on [0, 1]")));
            }
            let mass = integrate(|x| d.pdf(x), Interval::UNIT, &Tolerances::default())?;
            if (mass - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!("{name} signal density integrates to {mass}")));
            }
        }
        let xs: Vec<f64> = Interval::UNIT.grid(DEFAULT_GRID).collect();
        for w in xs.windows(2) {
            // Cross-multiplied so zero densities need no special casing.
            let lhs = skilled.pdf(w[1]) * unskilled.pdf(w[0]);
            let rhs = skilled.pdf(w[0]) * unskilled.pdf(w[1]);
            if lhs < rhs - 1e-12 * rhs.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "likelihood ratio decreases between x = {} and x = {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { skilled, unskilled })
    }

    pub fn skilled(&self) -> &Density {
        &self.skilled
    }

    pub fn unskilled(&self) -> &Density {
        &self.unskilled
    }

    pub fn tpr(&self, theta: f64) -> f64 {
        self.skilled.sf(theta)
    }

    pub fn fpr(&self, theta: f64) -> f64 {
        self.unskilled.sf(theta)
    }
}

/// Distribution of the cost of becoming skilled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    density: Density,
}

impl CostModel {
    pub fn new(density: Density) -> Result<Self> {
        density.validate()?;
        if density.support().lo() < 0.0 || density.cdf(0.0) != 0.0 {
            return Err(Error::InvalidArgument("cost distribution must satisfy G(0) = 0".into()));
        }
        Ok(Self { density })
    }

    /// `G(c)`, equal to 1 above the upper bound.
    pub fn cdf(&self, c: f64) -> f64 {
        self.density.cdf(c)
    }

    pub fn pdf(&self, c: f64) -> f64 {
        self.density.pdf(c)
    }

    pub fn pdf_derivative(&self, c: f64) -> Option<f64> {
        self.density.pdf_derivative(c)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.density.quantile(p)
    }

    /// `M_G`, the almost-sure upper bound of the cost.
    pub fn upper_bound(&self) -> f64 {
        self.density.support().hi()
    }

    pub fn density(&self) -> &Density {
        &self.density
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams {
    pub wage: f64,
    pub reward_pos: f64,
    pub penalty_neg: f64,
}

impl MarketParams {
    pub fn new(wage: f64, reward_pos: f64, penalty_neg: f64) -> Result<Self> {
        if !(wage.is_finite() && wage >= 0.0) {
            return Err(Error::InvalidArgument(format!("wage must be nonnegative, got {wage}")));
        }
        if !(reward_pos.is_finite() && reward_pos > 0.0) {
            return Err(Error::InvalidArgument(format!("reward must be positive, got {reward_pos}")));
        }
        if !(penalty_neg.is_finite() && penalty_neg >= 0.0) {
            return Err(Error::InvalidArgument(format!("penalty must be nonnegative, got {penalty_neg}")));
        }
        Ok(Self {
            wage,
            reward_pos,
            penalty_neg,
        })
    }
}

/// Result of repeated risk minimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RrmTrace {
    pub trajectory: Vec<f64>,
    pub converged: bool,
}

impl RrmTrace {
    pub fn last(&self) -> f64 {
        *self.trajectory.last().expect("trajectory holds the starting point")
    }
}

/// Global maximizers of the performative utility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSet {
    /// The maximizer with the largest value, ties to the smallest threshold.
    pub theta: f64,
    pub utility: f64,
    /// Every maximizer within the value band of the optimum, ascending.
    pub maximizers: Vec<f64>,
    pub unique: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoateLoury {
    pub signal: SignalModel,
    pub cost: CostModel,
    pub params: MarketParams,
    pub tol: Tolerances,
}

impl CoateLoury {
    pub fn new(signal: SignalModel, cost: CostModel, params: MarketParams) -> Self {
        Self {
            signal,
            cost,
            params,
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tpr(&self, theta: f64) -> f64 {
        self.signal.tpr(theta)
    }

    pub fn fpr(&self, theta: f64) -> f64 {
        self.signal.fpr(theta)
    }

    /// `TPR - FPR`, the wage-weighted incentive to become skilled.
    pub fn separation(&self, theta: f64) -> f64 {
        self.tpr(theta) - self.fpr(theta)
    }

    /// Skilled share `pi(theta) = G(max(0, w (TPR - FPR)))`.
    pub fn aggregate_response(&self, theta: f64) -> f64 {
        self.cost.cdf((self.params.wage * self.separation(theta)).max(0.0))
    }

    /// Employer utility of deploying `theta` when a share `pi` is skilled.
    pub fn vanilla_utility(&self, theta: f64, pi: f64) -> f64 {
        let p = &self.params;
        p.reward_pos * pi * self.tpr(theta) - p.penalty_neg * (1.0 - pi) * self.fpr(theta)
    }

    pub fn decoupled_utility(&self, theta_deploy: f64, theta_respond: f64) -> f64 {
        self.vanilla_utility(theta_deploy, self.aggregate_response(theta_respond))
    }

    pub fn perf_utility(&self, theta: f64) -> f64 {
        self.decoupled_utility(theta, theta)
    }

    /// `theta*(pi)`, the employer's best threshold against a fixed skilled share.
    pub fn best_response(&self, pi: f64) -> f64 {
        self.best_response_on(pi, DEFAULT_GRID)
    }

    pub fn best_response_on(&self, pi: f64, grid_n: usize) -> f64 {
        if pi <= 0.0 {
            return 1.0;
        }
        if pi >= 1.0 {
            return 0.0;
        }
        maximize_1d(|t| self.vanilla_utility(t, pi), Interval::UNIT, grid_n, &self.tol).0
    }

    /// The share at which the first-order condition holds at `theta`:
    /// `p- phi0 / (p+ phi1 + p- phi0)`. Equals `theta*^-1(theta)` wherever
    /// the best response is interior and unique.
    pub fn stationary_share(&self, theta: f64) -> f64 {
        let p = &self.params;
        let a = p.reward_pos * self.signal.skilled.pdf(theta);
        let b = p.penalty_neg * self.signal.unskilled.pdf(theta);
        b / (a + b)
    }

    /// Derivative of [`Self::stationary_share`], or `None` where a signal
    /// density is not differentiable.
    pub fn stationary_share_derivative(&self, theta: f64) -> Option<f64> {
        let p = &self.params;
        let (f1, f0) = (self.signal.skilled.pdf(theta), self.signal.unskilled.pdf(theta));
        let d1 = self.signal.skilled.pdf_derivative(theta)?;
        let d0 = self.signal.unskilled.pdf_derivative(theta)?;
        let denom = p.reward_pos * f1 + p.penalty_neg * f0;
        Some(p.reward_pos * p.penalty_neg * (d0 * f1 - f0 * d1) / (denom * denom))
    }

    /// The share `pi` with `theta*(pi) = theta`, found by bisection on the
    /// nonincreasing map `pi -> theta*(pi)`.
    pub fn best_response_inverse(&self, theta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("threshold {theta} outside [0, 1]")));
        }
        if theta == 1.0 {
            return Ok(0.0);
        }
        if theta == 0.0 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let (mut t_lo, mut t_hi) = (1.0_f64, 0.0_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let t = self.best_response(mid);
            if (t - theta).abs() <= 1e-9 {
                return Ok(mid);
            }
            if t > theta {
                lo = mid;
                t_lo = t;
            } else {
                hi = mid;
                t_hi = t;
            }
        }
        if (t_lo - theta).abs() <= 1e-4 || (t_hi - theta).abs() <= 1e-4 {
            return Ok(0.5 * (lo + hi));
        }
        Err(Error::Range {
            value: theta,
            lo: t_hi,
            hi: t_lo,
        })
    }

    /// Repeated risk minimization from `theta0`: deploy, observe the induced
    /// share, best-respond to it, until successive thresholds are within the
    /// fixed-point tolerance.
    pub fn rrm_run(&self, theta0: f64, max_iters: usize) -> RrmTrace {
        let mut trajectory = vec![theta0];
        let mut theta = theta0;
        for _ in 0..max_iters.max(1) {
            let next = self.best_response(self.aggregate_response(theta));
            trajectory.push(next);
            if (next - theta).abs() < self.tol.fixed_point_tol {
                return RrmTrace {
                    trajectory,
                    converged: true,
                };
            }
            theta = next;
        }
        RrmTrace {
            trajectory,
            converged: false,
        }
    }

    /// `|theta*(pi(theta)) - theta|`.
    pub fn stable_residual(&self, theta: f64) -> f64 {
        (self.best_response(self.aggregate_response(theta)) - theta).abs()
    }

    /// All stable thresholds, ascending. Interior candidates are roots of
    /// `stationary_share - pi`, kept only if they are genuine fixed points of
    /// the best-response map. `theta = 1` is included whenever `pi(1) = 0`.
    pub fn enumerate_stable(&self, grid_n: usize) -> Vec<f64> {
        let z = |t: f64| self.stationary_share(t) - self.aggregate_response(t);
        let mut stable: Vec<f64> = find_roots_1d(z, Interval::UNIT, grid_n.max(64), &self.tol)
            .into_iter()
            .filter(|&t| self.stable_residual(t) < STABLE_RESIDUAL)
            .collect();
        if self.stable_residual(0.0) < STABLE_RESIDUAL {
            stable.push(0.0);
        }
        if self.aggregate_response(1.0) == 0.0 {
            stable.push(1.0);
        }
        stable.sort_by(f64::total_cmp);
        stable.dedup_by(|b, a| (*b - *a).abs() < 1e-6);
        stable
    }

    /// Global maximizers of the performative utility. Peaks within `1e-6`
    /// (relative to the optimum's magnitude when it exceeds 1) of the best
    /// value all count as optimal.
    pub fn find_optimal(&self, grid_n: usize) -> OptimalSet {
        let f = |t: f64| self.perf_utility(t);
        let coarse = maximize_1d(f, Interval::UNIT, grid_n, &self.tol);
        let band = 1e-6 * coarse.1.abs().max(1.0);
        let peaks = near_optimal_peaks(f, Interval::UNIT, grid_n, &self.tol, band);
        let (theta, utility) = peaks
            .iter()
            .copied()
            .fold(coarse, |best, p| if p.1 > best.1 { p } else { best });
        OptimalSet {
            theta,
            utility,
            unique: peaks.len() <= 1,
            maximizers: if peaks.is_empty() { vec![theta] } else { peaks.iter().map(|p| p.0).collect() },
        }
    }

    pub fn diagnose(&self, grid_n: usize) -> TheoremDiagnostics {
        diagnostics::diagnose(self, grid_n)
    }
}

/// Signal model with uniform unskilled signals and `2x` skilled signals.
#[cfg(test)]
pub(crate) fn linear_signal() -> SignalModel {
    SignalModel::new(Density::Power { exponent: 1.0 }, Density::Uniform { lo: 0.0, hi: 1.0 }).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(wage: f64, p_pos: f64, p_neg: f64, m_g: f64) -> CoateLoury {
        CoateLoury::new(
            linear_signal(),
            CostModel::new(Density::Uniform { lo: 0.0, hi: m_g }).unwrap(),
            MarketParams::new(wage, p_pos, p_neg).unwrap(),
        )
    }

    #[test]
    fn rates_and_response() {
        let m = market(1.0, 1.0, 1.0, 1.0);
        assert!((m.tpr(0.5) - 0.75).abs() < 1e-15);
        assert!((m.fpr(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(m.tpr(1.0), 0.0);
        assert_eq!(m.fpr(1.0), 0.0);
        assert!((m.aggregate_response(0.5) - 0.25).abs() < 1e-15);
        assert_eq!(m.aggregate_response(1.0), 0.0);
        assert_eq!(market(0.0, 1.0, 1.0, 1.0).aggregate_response(0.3), 0.0);
    }

    #[test]
    fn utilities() {
        let m = market(1.0, 1.0, 1.0, 1.0);
        assert_eq!(m.perf_utility(1.0), 0.0);
        for t in [0.1, 0.4, 0.8] {
            assert_eq!(m.perf_utility(t), m.decoupled_utility(t, t));
            assert!((m.decoupled_utility(t, 1.0) + m.fpr(t)).abs() < 1e-15);
        }
        let m0 = market(1.0, 2.0, 0.0, 1.0);
        assert!((0..=100).all(|i| m0.perf_utility(i as f64 / 100.0) >= 0.0));
    }

    #[test]
    fn best_response_examples() {
        let m = market(1.0, 1.0, 1.0, 1.0);
        assert_eq!(m.best_response(0.0), 1.0);
        assert_eq!(m.best_response(1.0), 0.0);
        assert!((m.best_response(0.5) - 0.5).abs() < 1e-6);
        // pi = 0.25 puts the interior solution at 1.5, so the box binds.
        assert!((m.best_response(0.25) - 1.0).abs() < 1e-6);
        let mut prev = 1.0;
        for i in 1..50 {
            let t = m.best_response(i as f64 / 50.0);
            assert!(t <= prev + 1e-9);
            prev = t;
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = market(1.0, 1.0, 1.0, 1.0);
        assert!((m.best_response_inverse(0.5).unwrap() - 0.5).abs() < 1e-6);
        for i in 1..20 {
            let t = i as f64 / 20.0;
            let pi = m.best_response_inverse(t).unwrap();
            assert!((m.best_response(pi) - t).abs() < 1e-4);
            assert!((pi - m.stationary_share(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn stationary_derivative_matches_finite_difference() {
        let m = market(1.0, 2.0, 0.7, 1.0);
        for t in [0.1, 0.3, 0.6, 0.9] {
            let h = 1e-6;
            let fd = (m.stationary_share(t + h) - m.stationary_share(t - h)) / (2.0 * h);
            assert!((fd - m.stationary_share_derivative(t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_wage_market() {
        let m = market(0.0, 1.0, 1.0, 1.0);
        let trace = m.rrm_run(0.3, 10);
        assert!(trace.converged);
        assert_eq!(trace.trajectory, vec![0.3, 1.0, 1.0]);
        assert_eq!(m.enumerate_stable(512), vec![1.0]);
        let opt = m.find_optimal(512);
        assert_eq!(opt.theta, 1.0);
        assert_eq!(opt.utility, 0.0);
    }

    #[test]
    fn rrm_from_fixed_point_stops_immediately() {
        let m = market(1.0, 1.0, 1.0, 0.2);
        for s in m.enumerate_stable(512) {
            let trace = m.rrm_run(s, 10);
            assert!(trace.converged);
            assert_eq!(trace.trajectory.len(), 2, "stable point {s}");
        }
    }

    #[test]
    fn rejects_decreasing_likelihood_ratio() {
        let err = SignalModel::new(Density::Uniform { lo: 0.0, hi: 1.0 }, Density::Power { exponent: 1.0 });
        assert!(err.is_err());
    }
}
