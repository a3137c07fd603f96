//! Two identifiable groups facing the same Coate-Loury market.

use serde::Serialize;

use crate::coate_loury::CoateLoury;
use crate::error::{Error, Result};
use crate::policy::PolicyPair;

/// Gap above which a pair counts as discriminatory.
pub const DEFAULT_REPORT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoGroupMarket {
    pub market: CoateLoury,
    pub lambda_maj: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquityReport {
    pub pair: PolicyPair,
    pub pi_maj: f64,
    pub pi_min: f64,
    pub gap: f64,
    pub pooled_utility: f64,
    pub discriminatory: bool,
}

impl TwoGroupMarket {
    pub fn new(market: CoateLoury, lambda_maj: f64) -> Result<Self> {
        if !(lambda_maj > 0.0 && lambda_maj < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1), got {lambda_maj}")));
        }
        Ok(Self { market, lambda_maj })
    }

    /// Same market with group labels exchanged.
    pub fn relabeled(&self) -> Self {
        Self {
            market: self.market,
            lambda_maj: 1.0 - self.lambda_maj,
        }
    }

    pub fn group_responses(&self, pair: PolicyPair) -> (f64, f64) {
        (
            self.market.aggregate_response(pair.theta_maj),
            self.market.aggregate_response(pair.theta_min),
        )
    }

    pub fn pooled_utility(&self, pair: PolicyPair) -> f64 {
        self.lambda_maj * self.market.perf_utility(pair.theta_maj)
            + (1.0 - self.lambda_maj) * self.market.perf_utility(pair.theta_min)
    }

    pub fn equity_report(&self, pair: PolicyPair, report_tol: f64) -> EquityReport {
        let (pi_maj, pi_min) = self.group_responses(pair);
        let gap = (pi_maj - pi_min).abs();
        EquityReport {
            pair,
            pi_maj,
            pi_min,
            gap,
            pooled_utility: self.pooled_utility(pair),
            discriminatory: gap > report_tol,
        }
    }

    /// Every pair of single-group stable thresholds.
    pub fn stable_pairs(&self, grid_n: usize) -> Vec<PolicyPair> {
        product(&self.market.enumerate_stable(grid_n))
    }

    /// Every pair of single-group optimal thresholds.
    pub fn optimal_pairs(&self, grid_n: usize) -> Vec<PolicyPair> {
        product(&self.market.find_optimal(grid_n).maximizers)
    }

    /// The stable pair with the largest gap, ties to the first in order.
    pub fn max_gap_stable_pair(&self, grid_n: usize) -> Option<EquityReport> {
        self.stable_pairs(grid_n)
            .into_iter()
            .map(|p| self.equity_report(p, DEFAULT_REPORT_TOL))
            .fold(None, |best: Option<EquityReport>, r| match best {
                Some(b) if b.gap >= r.gap => Some(b),
                _ => Some(r),
            })
    }
}

fn product(thetas: &[f64]) -> Vec<PolicyPair> {
    thetas
        .iter()
        .flat_map(|&a| thetas.iter().map(move |&b| PolicyPair::new(a, b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coate_loury::{linear_signal, CostModel, MarketParams};
    use crate::numerics::Density;

    fn fairness_market(lambda: f64) -> TwoGroupMarket {
        let m = CoateLoury::new(
            linear_signal(),
            CostModel::new(Density::Uniform { lo: 0.0, hi: 0.2 }).unwrap(),
            MarketParams::new(1.0, 1.0, 1.0).unwrap(),
        );
        TwoGroupMarket::new(m, lambda).unwrap()
    }

    #[test]
    fn responses_follow_own_threshold() {
        let tg = fairness_market(0.8);
        let (a, b) = tg.group_responses(PolicyPair::uniform(0.4));
        assert_eq!(a, b);
        let pair = PolicyPair::new(0.5, 1.0);
        let (a, b) = tg.group_responses(pair);
        assert_eq!(a, 1.0);
        assert_eq!(b, 0.0);
        assert_eq!(tg.group_responses(pair.swapped()), (b, a));
    }

    #[test]
    fn pooled_utility_recomposes() {
        let tg = fairness_market(0.8);
        let pair = PolicyPair::new(0.3, 0.7);
        let direct = 0.8 * tg.market.perf_utility(0.3) + 0.2 * tg.market.perf_utility(0.7);
        assert!((tg.pooled_utility(pair) - direct).abs() < 1e-15);
        let half = fairness_market(0.5);
        assert!((half.pooled_utility(PolicyPair::uniform(0.3)) - half.market.perf_utility(0.3)).abs() < 1e-15);
    }

    #[test]
    fn stable_pairs_are_a_product() {
        let tg = fairness_market(0.8);
        let n = tg.market.enumerate_stable(512).len();
        assert!(n >= 2);
        assert_eq!(tg.stable_pairs(512).len(), n * n);
        let relabeled = tg.relabeled();
        assert_eq!(relabeled.stable_pairs(512), tg.stable_pairs(512));
        let best = tg.max_gap_stable_pair(512).unwrap();
        assert!(best.discriminatory);
    }
}
