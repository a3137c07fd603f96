use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{Loss, ResponseModel, SmoothPolicy, DEFAULT_TEMPERATURE};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

fn default_eta0() -> f64 {
    0.1
}
fn default_theta0() -> f64 {
    0.1
}
fn default_rounds() -> usize {
    20
}
fn default_outer() -> usize {
    100
}
fn default_inner() -> usize {
    16
}
fn default_population() -> usize {
    1000
}
fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}
fn default_trials() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SgdMode {
    /// Full gradient including the worker response terms.
    Performative,
    /// Only the direct policy term, as if the distribution were fixed.
    Naive,
}

impl SgdMode {
    pub fn name(&self) -> &'static str {
        match self {
            SgdMode::Performative => "performative",
            SgdMode::Naive => "naive",
        }
    }
}

/// Step size `eta0 / (t + 1)`. Each round samples `n_outer` skills without
/// replacement from a fixed population of size `population`, or draws fresh
/// skills when `population` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdConfig {
    #[serde(default = "default_eta0")]
    pub eta0: f64,
    #[serde(default = "default_theta0")]
    pub theta0: f64,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_outer")]
    pub n_outer: usize,
    #[serde(default = "default_inner")]
    pub n_inner: usize,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            eta0: default_eta0(),
            theta0: default_theta0(),
            rounds: default_rounds(),
            n_outer: default_outer(),
            n_inner: default_inner(),
            population: default_population(),
            temperature: default_temperature(),
            trials: default_trials(),
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::config(format!("sgd.{key}"), msg));
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return bad("eta0", format!("must be positive, got {}", self.eta0));
        }
        if !self.theta0.is_finite() {
            return bad("theta0", "must be finite".into());
        }
        if self.n_outer == 0 {
            return bad("n_outer", "must be at least 1".into());
        }
        if self.n_inner == 0 {
            return bad("n_inner", "must be at least 1".into());
        }
        if self.population != 0 && self.population < self.n_outer {
            return bad(
                "population",
                format!("must be 0 or at least n_outer = {}, got {}", self.n_outer, self.population),
            );
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad("temperature", format!("must be positive, got {}", self.temperature));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SgdStep {
    /// 1-based round index.
    pub round: usize,
    pub theta: f64,
    /// Batch mean loss at the policy deployed during this round.
    pub loss_estimate: f64,
    pub dropped: usize,
}

/// One training run. Returns the state after each round.
pub fn rsgd_run(
    model: &ResponseModel,
    theta0: f64,
    loss: &dyn Loss,
    cfg: &SgdConfig,
    mode: SgdMode,
    stream: RngStream,
) -> Result<Vec<SgdStep>> {
    cfg.validate()?;
    let domain = model.policy_domain();
    let population: Option<Vec<f64>> = (cfg.population > 0).then(|| {
        let mut rng = stream.child(0).rng();
        (0..cfg.population).map(|_| model.skill.draw(&mut rng)).collect()
    });
    let mut theta = domain.clamp(theta0);
    let mut steps = Vec::with_capacity(cfg.rounds);
    for t in 0..cfg.rounds {
        let round = stream.child(t as u64 + 1);
        let mut rng = round.rng();
        let ys: Vec<f64> = match &population {
            Some(pop) => index::sample(&mut rng, pop.len(), cfg.n_outer)
                .into_iter()
                .map(|i| pop[i])
                .collect(),
            None => (0..cfg.n_outer).map(|_| model.skill.draw(&mut rng)).collect(),
        };
        let policy = SmoothPolicy::new(theta, cfg.temperature)?;
        let responder = model.responder(policy);
        let est = responder.reinforce_grad(loss, &ys, cfg.n_inner, round.child(0))?;
        let grad = match mode {
            SgdMode::Performative => est.total,
            SgdMode::Naive => est.g1,
        };
        let eta = cfg.eta0 / (t as f64 + 1.0);
        theta = domain.clamp(theta - eta * grad * est.n_outer as f64);
        steps.push(SgdStep {
            round: t + 1,
            theta,
            loss_estimate: est.loss,
            dropped: est.dropped,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::super::tests::model;
    use super::super::ConstantLoss;
    use super::*;

    fn stream(k: u64) -> RngStream {
        RngStream::new(0, 0).child(k)
    }

    #[test]
    fn zero_loss_keeps_theta() {
        let (m, _) = model(2.0, 1.0, 5.0);
        let cfg = SgdConfig {
            rounds: 3,
            n_outer: 10,
            n_inner: 2,
            ..SgdConfig::default()
        };
        let steps = rsgd_run(&m, 0.3, &ConstantLoss(0.0), &cfg, SgdMode::Performative, stream(0)).unwrap();
        assert!(steps.iter().all(|s| s.theta == 0.3));
    }

    #[test]
    fn runs_are_reproducible() {
        let (m, loss) = model(2.0, 1.0, 5.0);
        let cfg = SgdConfig {
            rounds: 4,
            n_outer: 20,
            ..SgdConfig::default()
        };
        let a = rsgd_run(&m, cfg.theta0, &loss, &cfg, SgdMode::Performative, stream(3)).unwrap();
        let b = rsgd_run(&m, cfg.theta0, &loss, &cfg, SgdMode::Performative, stream(3)).unwrap();
        assert_eq!(a, b);
        let c = rsgd_run(&m, cfg.theta0, &loss, &cfg, SgdMode::Performative, stream(4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_rounds_is_empty() {
        let (m, loss) = model(2.0, 1.0, 5.0);
        let cfg = SgdConfig {
            rounds: 0,
            ..SgdConfig::default()
        };
        assert!(rsgd_run(&m, 0.1, &loss, &cfg, SgdMode::Naive, stream(0)).unwrap().is_empty());
    }

    #[test]
    fn config_validation_names_keys() {
        let cfg = SgdConfig {
            n_inner: 0,
            ..SgdConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "sgd.n_inner"),
            other => panic!("{other:?}"),
        }
    }
}
