use serde::Serialize;

use super::CoateLoury;
use crate::numerics::Interval;

const PI_GRID: usize = 32;
const CONTRACTION_GRID: usize = 128;

/// Outcome of checking a hypothesis numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Pass,
    Fail,
    NotEvaluable,
}

impl Flag {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Flag::Pass
        } else {
            Flag::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self == Flag::Pass
    }
}

/// Whether each theorem's hypotheses hold for the market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremFlags {
    /// High wage: `w > M_G / delta1` and `p+ > p- / (delta1 delta2)`.
    pub high_wage_welfare: Flag,
    /// Low wage: `w > 0`, `p+ > max(1, p- pi(t)/(1 - pi(t)))`, `delta1 delta2 > p-`.
    pub low_wage_welfare: Flag,
    /// `p+ = p-`, `w > M_G / (1 - eps)`, and a finite Lipschitz constant.
    pub high_wage_equity: Flag,
    /// `p+ = p-`, `gamma > 0`, and `w` inside the low-wage window.
    pub low_wage_equity: Flag,
    /// `gamma > 0`.
    pub strong_concavity: Flag,
    /// Estimated slope of `theta*(pi(theta))` below 1.
    pub rrm_contraction: Flag,
}

/// Grid estimates of the constants appearing in the welfare and equity
/// hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremDiagnostics {
    pub grid_n: usize,
    /// Largest `TPR - FPR` on the grid.
    pub delta1: f64,
    /// Threshold attaining `delta1`.
    pub delta1_arg: f64,
    /// Smallest likelihood ratio `phi1 / phi0` on the grid.
    pub delta2: f64,
    /// `1 - delta1`.
    pub epsilon_sep: f64,
    pub m_g: f64,
    /// Skilled share at `delta1_arg`.
    pub pi_at_delta1_arg: f64,
    /// Largest `|d/dtheta theta*^-1|` on `[0, delta1_arg]`.
    pub lipschitz_c: Option<f64>,
    /// Smallest `-d^2/dtheta^2 U(theta, pi)` over thresholds and attainable shares.
    pub concavity_gamma: f64,
    pub k1: f64,
    pub k2: Option<f64>,
    /// `G^-1(phi0 / ((1 - eps)(phi1 + phi0)))` at `delta1_arg`, if defined.
    pub low_wage_floor: Option<f64>,
    /// `gamma / (2 K1 K2)`.
    pub low_wage_ceiling: Option<f64>,
    /// `w sup g sup |phi1 - phi0|`, a bound on the slope of `pi`.
    pub rrm_sensitivity: f64,
    /// Largest finite-difference slope of `theta*(pi(theta))`.
    pub rrm_contraction: f64,
    pub flags: TheoremFlags,
}

fn interior_grid(domain: Interval, n: usize) -> impl Iterator<Item = f64> {
    let step = domain.width() / n as f64;
    (1..n).map(move |i| domain.lo() + step * i as f64)
}

pub(super) fn diagnose(m: &CoateLoury, grid_n: usize) -> TheoremDiagnostics {
    let grid_n = grid_n.max(16);
    let p = m.params;
    let thetas: Vec<f64> = Interval::UNIT.grid(grid_n).collect();

    let (mut delta1, mut delta1_arg) = (f64::NEG_INFINITY, 0.0);
    for &t in &thetas {
        let s = m.separation(t);
        if s > delta1 {
            delta1 = s;
            delta1_arg = t;
        }
    }
    let delta2 = thetas
        .iter()
        .map(|&x| {
            let (f1, f0) = (m.signal.skilled().pdf(x), m.signal.unskilled().pdf(x));
            if f0 > 0.0 {
                f1 / f0
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min);
    let epsilon_sep = 1.0 - delta1;
    let m_g = m.cost.upper_bound();
    let pi_at_delta1_arg = m.aggregate_response(delta1_arg);

    let lipschitz_c = thetas
        .iter()
        .filter(|&&t| t <= delta1_arg)
        .map(|&t| m.stationary_share_derivative(t).map(f64::abs))
        .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)));

    let pi_max = m.cost.cdf((p.wage * delta1).max(0.0));
    let h = 1.0 / grid_n as f64;
    let mut gamma = f64::INFINITY;
    for j in 0..=PI_GRID {
        let pi = pi_max * j as f64 / PI_GRID as f64;
        for t in interior_grid(Interval::UNIT, grid_n) {
            let d2 = (m.vanilla_utility(t + h, pi) - 2.0 * m.vanilla_utility(t, pi) + m.vanilla_utility(t - h, pi)) / (h * h);
            gamma = gamma.min(-d2);
        }
    }

    let cost_domain = Interval::new(0.0, m_g).unwrap_or(Interval::UNIT);
    let sup_g = interior_grid(cost_domain, grid_n).map(|c| m.cost.pdf(c)).fold(0.0, f64::max);
    let sup_phi = thetas
        .iter()
        .map(|&x| m.signal.skilled().pdf(x).max(m.signal.unskilled().pdf(x)))
        .fold(0.0, f64::max);
    let k1 = sup_g.max(sup_phi);
    let sup_dg = interior_grid(cost_domain, grid_n)
        .map(|c| m.cost.pdf_derivative(c).map(f64::abs))
        .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)));
    let sup_dphi = thetas
        .iter()
        .map(|&x| {
            let d1 = m.signal.skilled().pdf_derivative(x)?;
            let d0 = m.signal.unskilled().pdf_derivative(x)?;
            Some(d1.abs().max(d0.abs()))
        })
        .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)));
    let k2 = match (sup_dg, sup_dphi) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };

    let share = {
        let (f1, f0) = (m.signal.skilled().pdf(delta1_arg), m.signal.unskilled().pdf(delta1_arg));
        f0 / ((1.0 - epsilon_sep) * (f1 + f0))
    };
    let low_wage_floor = (share.is_finite() && share <= 1.0).then(|| m.cost.quantile(share));
    let low_wage_ceiling = k2.filter(|&k2| k2 > 0.0 && k1 > 0.0).map(|k2| gamma / (2.0 * k1 * k2));

    let sup_gap = thetas
        .iter()
        .map(|&x| (m.signal.skilled().pdf(x) - m.signal.unskilled().pdf(x)).abs())
        .fold(0.0, f64::max);
    let rrm_sensitivity = p.wage * sup_g * sup_gap;

    let taus: Vec<(f64, f64)> = Interval::UNIT
        .grid(CONTRACTION_GRID)
        .map(|t| (t, m.best_response(m.aggregate_response(t))))
        .collect();
    let rrm_contraction = taus
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
        .fold(0.0, f64::max);

    let equal_payoffs = (p.reward_pos - p.penalty_neg).abs() <= 1e-12 * p.reward_pos.max(p.penalty_neg);
    let separates = delta1 > 0.0;

    let high_wage_welfare = Flag::from_bool(
        separates && delta2 > 0.0 && p.wage > m_g / delta1 && p.reward_pos > p.penalty_neg / (delta1 * delta2),
    );
    let pi_odds = if pi_at_delta1_arg < 1.0 {
        pi_at_delta1_arg / (1.0 - pi_at_delta1_arg)
    } else {
        f64::INFINITY
    };
    let low_wage_welfare = Flag::from_bool(
        separates
            && p.wage > 0.0
            && p.reward_pos > 1.0_f64.max(pi_odds * p.penalty_neg)
            && delta1 * delta2 > p.penalty_neg,
    );
    let high_wage_equity = match lipschitz_c {
        None => Flag::NotEvaluable,
        Some(_) => Flag::from_bool(equal_payoffs && separates && p.wage > m_g / (1.0 - epsilon_sep)),
    };
    let low_wage_equity = match (low_wage_ceiling, k2) {
        (_, None) => Flag::NotEvaluable,
        (ceiling, Some(_)) => Flag::from_bool(
            equal_payoffs
                && gamma > 0.0
                && matches!((low_wage_floor, ceiling), (Some(lo), Some(hi)) if lo < p.wage && p.wage < hi),
        ),
    };

    TheoremDiagnostics {
        grid_n,
        delta1,
        delta1_arg,
        delta2,
        epsilon_sep,
        m_g,
        pi_at_delta1_arg,
        lipschitz_c,
        concavity_gamma: gamma,
        k1,
        k2,
        low_wage_floor,
        low_wage_ceiling,
        rrm_sensitivity,
        rrm_contraction,
        flags: TheoremFlags {
            high_wage_welfare,
            low_wage_welfare,
            high_wage_equity,
            low_wage_equity,
            strong_concavity: Flag::from_bool(gamma > 0.0),
            rrm_contraction: Flag::from_bool(rrm_contraction < 1.0),
        },
    }
}
