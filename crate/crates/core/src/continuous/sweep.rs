use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ContinuousMarket, MarketSpec};
use crate::error::Result;
use crate::numerics::Tolerances;
use crate::policy::{Group, PolicyPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Stable,
    Optimal,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Stable => "stable",
            PolicyKind::Optimal => "optimal",
        }
    }
}

/// Quantities reported per sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    EmployerUtility,
    WorkerWelfare,
    ProportionQualified,
    QualifiedMaj,
    QualifiedMin,
    QualifiedGap,
    WelfareMaj,
    WelfareMin,
    ThetaMaj,
    ThetaMin,
    Converged,
}

impl Metric {
    /// Alphabetical by column name.
    pub const ALL: [Metric; 11] = [
        Metric::Converged,
        Metric::EmployerUtility,
        Metric::ProportionQualified,
        Metric::QualifiedGap,
        Metric::QualifiedMaj,
        Metric::QualifiedMin,
        Metric::ThetaMaj,
        Metric::ThetaMin,
        Metric::WelfareMaj,
        Metric::WelfareMin,
        Metric::WorkerWelfare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::EmployerUtility => "employer_utility",
            Metric::WorkerWelfare => "worker_welfare",
            Metric::ProportionQualified => "proportion_qualified",
            Metric::QualifiedMaj => "qualified_maj",
            Metric::QualifiedMin => "qualified_min",
            Metric::QualifiedGap => "qualified_gap",
            Metric::WelfareMaj => "welfare_maj",
            Metric::WelfareMin => "welfare_min",
            Metric::ThetaMaj => "theta_maj",
            Metric::ThetaMin => "theta_min",
            Metric::Converged => "converged",
        }
    }

    pub fn parse(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }

    /// `None` when the row failed or the metric does not apply.
    pub fn value(&self, row: &SweepRow) -> Option<f64> {
        let p = row.point.as_ref()?;
        match self {
            Metric::EmployerUtility => Some(p.employer_utility),
            Metric::WorkerWelfare => Some(p.worker_welfare),
            Metric::ProportionQualified => Some(p.proportion_qualified),
            Metric::QualifiedMaj => Some(p.qualified_maj),
            Metric::QualifiedMin => p.qualified_min,
            Metric::QualifiedGap => p.qualified_min.map(|q| p.qualified_maj - q),
            Metric::WelfareMaj => Some(p.welfare_maj),
            Metric::WelfareMin => p.welfare_min,
            Metric::ThetaMaj => Some(p.pair.theta_maj),
            Metric::ThetaMin => Some(p.pair.theta_min),
            Metric::Converged => Some(if p.converged { 1.0 } else { 0.0 }),
        }
    }
}

/// Evaluation of one policy pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub pair: PolicyPair,
    pub converged: bool,
    pub employer_utility: f64,
    pub worker_welfare: f64,
    pub static_welfare: f64,
    pub proportion_qualified: f64,
    pub qualified_maj: f64,
    pub qualified_min: Option<f64>,
    pub welfare_maj: f64,
    pub welfare_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub policy: PolicyKind,
    pub point: Option<PointReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub grid_n: usize,
    pub stable_tol: f64,
    pub max_iters: usize,
    pub tol: Tolerances,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            grid_n: 128,
            stable_tol: 1e-3,
            max_iters: 100,
            tol: Tolerances::default(),
        }
    }
}

impl ContinuousMarket {
    pub fn evaluate(&self, pair: PolicyPair, converged: bool) -> PointReport {
        let welfare = self.welfare_by_group(pair);
        let qualified = self.qualified_by_group(pair);
        let pick = |v: &[(Group, f64)], g: Group| v.iter().find(|(h, _)| *h == g).map(|(_, x)| *x);
        PointReport {
            pair,
            converged,
            employer_utility: self.employer_perf_utility(pair),
            worker_welfare: self.aggregate_worker_welfare(pair),
            static_welfare: self.static_welfare(pair),
            proportion_qualified: self.proportion_qualified(pair),
            qualified_maj: pick(&qualified, Group::Maj).unwrap_or(0.0),
            qualified_min: pick(&qualified, Group::Min),
            welfare_maj: pick(&welfare, Group::Maj).unwrap_or(0.0),
            welfare_min: pick(&welfare, Group::Min),
        }
    }

    /// Optimal and stable points, the latter by retraining from the former.
    pub fn solve(&self, settings: &SweepSettings) -> (PointReport, PointReport) {
        let first = self.find_optimal_continuous(settings.grid_n, &[]);
        let stable = self.find_stable_continuous(first.pair, settings.stable_tol, settings.max_iters, settings.grid_n);
        let optimal = self.find_optimal_continuous(settings.grid_n, &[first.pair, stable.pair]);
        (self.evaluate(optimal.pair, true), self.evaluate(stable.pair, stable.converged))
    }
}

fn welfare_check(point: &PointReport) -> Option<String> {
    (point.worker_welfare < point.static_welfare - 1e-7).then(|| {
        format!(
            "welfare {} below the stay-put counterfactual {}",
            point.worker_welfare, point.static_welfare
        )
    })
}

/// Solves the market built for each value, in parallel. Rows come back in
/// input order, stable before optimal; failures are recorded per row.
pub fn sweep<B>(builder: B, values: &[f64], settings: &SweepSettings) -> Vec<SweepRow>
where
    B: Fn(f64) -> Result<MarketSpec> + Sync,
{
    values
        .par_iter()
        .map(|&value| {
            let market = builder(value).and_then(|spec| ContinuousMarket::with_tolerances(spec, settings.tol));
            match market {
                Ok(m) => {
                    let (optimal, stable) = m.solve(settings);
                    [(PolicyKind::Stable, stable), (PolicyKind::Optimal, optimal)]
                        .map(|(policy, point)| SweepRow {
                            value,
                            policy,
                            error: welfare_check(&point),
                            point: Some(point),
                        })
                        .to_vec()
                }
                Err(e) => [PolicyKind::Stable, PolicyKind::Optimal]
                    .map(|policy| SweepRow {
                        value,
                        policy,
                        point: None,
                        error: Some(e.to_string()),
                    })
                    .to_vec(),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_values_give_empty_table() {
        let rows = sweep(|_| Ok(linear_flat(2.0, 1.0, 5.0)), &[], &SweepSettings::default());
        assert!(rows.is_empty());
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let rows = sweep(
            |v| {
                if v < 0.0 {
                    Err(Error::InvalidArgument("negative".into()))
                } else {
                    Ok(linear_flat(2.0, 1.0, v))
                }
            },
            &[-1.0, 8.0],
            &SweepSettings::default(),
        );
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_some() && rows[1].error.is_some());
        assert!(rows[2].point.is_some() && rows[2].error.is_none());
        assert_eq!(rows[3].policy, PolicyKind::Optimal);
    }

    #[test]
    fn metric_names_round_trip_in_order() {
        let names: Vec<_> = Metric::ALL.iter().map(Metric::name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for m in Metric::ALL {
            assert_eq!(Metric::parse(m.name()), Some(m));
        }
    }
}
