use serde::Serialize;

use super::ContinuousMarket;
use crate::numerics::{golden_section_max, maximize_1d, Interval};
use crate::policy::{Group, PolicyPair};

/// Outcome of repeated retraining from a starting pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableSearch {
    pub pair: PolicyPair,
    pub converged: bool,
    pub iterations: usize,
    /// Distance between the last two iterates.
    pub step: f64,
    pub trajectory: Vec<PolicyPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalPair {
    pub pair: PolicyPair,
    pub utility: f64,
}

impl ContinuousMarket {
    fn single_group(&self) -> bool {
        self.groups().len() == 1
    }

    fn mirror(&self, pair: PolicyPair) -> PolicyPair {
        if self.single_group() {
            PolicyPair::uniform(pair.theta_maj)
        } else {
            pair
        }
    }

    /// One retraining step: each group's threshold maximizes the employer
    /// objective with worker responses frozen at `current`.
    pub fn retrain_step(&self, current: PolicyPair, grid_n: usize) -> PolicyPair {
        let domain = self.policy_domain();
        let mut next = current;
        for (group, _) in self.groups() {
            let objective = |t: f64| self.decoupled_utility(self.mirror(current.with(group, t)), current);
            let (arg, _) = maximize_1d(objective, domain, grid_n, self.tolerances());
            next = next.with(group, arg);
        }
        self.mirror(next)
    }

    /// Repeated retraining until successive pairs are within `tol`.
    pub fn find_stable_continuous(&self, start: PolicyPair, tol: f64, max_iters: usize, grid_n: usize) -> StableSearch {
        let mut current = self.mirror(start);
        let mut trajectory = vec![current];
        let mut step = f64::INFINITY;
        for it in 1..=max_iters {
            let next = self.retrain_step(current, grid_n);
            step = next.distance(&current);
            trajectory.push(next);
            current = next;
            if step < tol {
                return StableSearch {
                    pair: current,
                    converged: true,
                    iterations: it,
                    step,
                    trajectory,
                };
            }
        }
        StableSearch {
            pair: current,
            converged: false,
            iterations: max_iters,
            step,
            trajectory,
        }
    }

    /// Maximizer of the performative employer utility. `candidates`, such
    /// as stable pairs, are compared against the search result.
    pub fn find_optimal_continuous(&self, grid_n: usize, candidates: &[PolicyPair]) -> OptimalPair {
        let domain = self.policy_domain();
        let tol = self.tolerances();
        let production = self.spec().utility.production;
        let mut best = if self.single_group() {
            let (arg, utility) =
                maximize_1d(|t| self.employer_perf_utility(PolicyPair::uniform(t)), domain, grid_n, tol);
            OptimalPair {
                pair: PolicyPair::uniform(arg),
                utility,
            }
        } else if production.is_identity() {
            // The objective is a weighted sum of per-group terms.
            let mut pair = PolicyPair::uniform(domain.midpoint());
            for group in Group::BOTH {
                let (arg, _) = maximize_1d(|t| self.employer_perf_utility(pair.with(group, t)), domain, grid_n, tol);
                pair = pair.with(group, arg);
            }
            OptimalPair {
                pair,
                utility: self.employer_perf_utility(pair),
            }
        } else {
            self.joint_search(domain, grid_n.clamp(8, 64))
        };
        for &c in candidates {
            let c = self.mirror(c);
            let utility = self.employer_perf_utility(c);
            if utility > best.utility {
                best = OptimalPair { pair: c, utility };
            }
        }
        best
    }

    fn joint_search(&self, domain: Interval, n: usize) -> OptimalPair {
        let grid: Vec<f64> = domain.grid(n).collect();
        let mut best = OptimalPair {
            pair: PolicyPair::uniform(grid[0]),
            utility: f64::NEG_INFINITY,
        };
        for &a in &grid {
            for &b in &grid {
                let pair = PolicyPair::new(a, b);
                let utility = self.employer_perf_utility(pair);
                if utility > best.utility {
                    best = OptimalPair { pair, utility };
                }
            }
        }
        let step = domain.width() / n as f64;
        for _ in 0..2 {
            for group in Group::BOTH {
                let center = best.pair.get(group);
                let lo = domain.clamp(center - step);
                let hi = domain.clamp(center + step);
                let (arg, utility) = golden_section_max(
                    |t| self.employer_perf_utility(best.pair.with(group, t)),
                    lo,
                    hi,
                    self.tolerances().opt_tol,
                );
                if utility > best.utility {
                    best = OptimalPair {
                        pair: best.pair.with(group, arg),
                        utility,
                    };
                }
            }
        }
        best
    }
}
