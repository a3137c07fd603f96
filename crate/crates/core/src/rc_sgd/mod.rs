//! Stochastic gradient descent on the performative loss when workers respond
//! to the deployed policy by changing their skill.
//!
//! The deployed policy is a logistic surrogate of a threshold so that the
//! derivative of the policy in `theta` is informative. The worker response
//! derivative comes from the implicit function theorem applied to the
//! worker's first-order condition; the loss gradient is estimated with
//! score-function (REINFORCE) averages over signals.

mod train;

pub use train::{rsgd_run, SgdConfig, SgdMode, SgdStep};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuous::{BaseUtility, ContinuousMarket, CostKind, SignalKernel, WageStructure};
use crate::error::{Error, Result};
use crate::numerics::{catmull_rom, integrate_best_effort, kronrod_rule, maximize_1d, Density, Interval, RngStream, Tolerances};
use crate::policy::Group;

pub const DEFAULT_TEMPERATURE: f64 = 0.02;

const RESPONSE_TABLE: usize = 1024;
const RESPONSE_GRID: usize = 64;
/// Below this improvement the response sits on the `y' = y` boundary.
const BOUNDARY_GAP: f64 = 1e-7;

/// `f(x) = logistic((x - theta) / temperature)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothPolicy {
    pub theta: f64,
    pub temperature: f64,
}

impl SmoothPolicy {
    pub fn new(theta: f64, temperature: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("theta must be finite, got {theta}")));
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self { theta, temperature })
    }

    pub fn value(&self, x: f64) -> f64 {
        let z = (x - self.theta) / self.temperature;
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }

    /// `d f / d theta`.
    pub fn d_theta(&self, x: f64) -> f64 {
        let f = self.value(x);
        -f * (1.0 - f) / self.temperature
    }
}

/// A loss `l(prediction, outcome)` with its partial derivatives.
pub trait Loss: Sync {
    fn value(&self, prediction: f64, outcome: f64) -> f64;
    fn d_prediction(&self, prediction: f64, outcome: f64) -> f64;
    fn d_outcome(&self, prediction: f64, outcome: f64) -> f64;
}

/// `l(f, y) = -u(y) f`: the negative employer utility of a hire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmployerLoss {
    pub base: BaseUtility,
}

impl Loss for EmployerLoss {
    fn value(&self, prediction: f64, outcome: f64) -> f64 {
        -self.base.eval(outcome) * prediction
    }

    fn d_prediction(&self, _prediction: f64, outcome: f64) -> f64 {
        -self.base.eval(outcome)
    }

    fn d_outcome(&self, prediction: f64, _outcome: f64) -> f64 {
        match self.base {
            BaseUtility::Linear { slope, .. } => -slope * prediction,
            BaseUtility::SignStep { .. } => 0.0,
        }
    }
}

/// A loss that ignores its arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLoss(pub f64);

impl Loss for ConstantLoss {
    fn value(&self, _: f64, _: f64) -> f64 {
        self.0
    }

    fn d_prediction(&self, _: f64, _: f64) -> f64 {
        0.0
    }

    fn d_outcome(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// `l(f, y) = f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionLoss;

impl Loss for PredictionLoss {
    fn value(&self, prediction: f64, _: f64) -> f64 {
        prediction
    }

    fn d_prediction(&self, _: f64, _: f64) -> f64 {
        1.0
    }

    fn d_outcome(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// Workers facing a flat wage and quadratic improvement cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModel {
    pub kernel: SignalKernel,
    pub skill: Density,
    pub wage: f64,
    pub cost_scale: f64,
    pub response_domain: Interval,
    pub tol: Tolerances,
}

impl ResponseModel {
    /// The majority group of a flat-wage, quadratic-cost market.
    pub fn from_market(market: &ContinuousMarket) -> Result<Self> {
        let spec = market.spec();
        let WageStructure::Flat { wage } = spec.wage else {
            return Err(Error::InvalidArgument("gradient training needs a flat wage".into()));
        };
        if spec.cost.kind != CostKind::Quadratic {
            return Err(Error::InvalidArgument("gradient training needs a quadratic cost".into()));
        }
        Ok(Self {
            kernel: *market.kernel(),
            skill: *market.skill(),
            wage,
            cost_scale: spec.cost.scale_for(Group::Maj),
            response_domain: market.response_domain(),
            tol: *market.tolerances(),
        })
    }

    pub fn policy_domain(&self) -> Interval {
        self.kernel.domain
    }

    /// Quadrature rule over signals, refined where the policy switches and,
    /// for the polynomial kernel, geometrically toward the lower edge.
    fn signal_rule(&self, policy: &SmoothPolicy) -> Vec<(f64, f64)> {
        let d = self.kernel.domain;
        let mut cuts: Vec<f64> = d.grid(16).collect();
        for k in [-30.0, -20.0, -12.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 12.0, 20.0, 30.0] {
            cuts.push(policy.theta + k * policy.temperature);
        }
        if matches!(self.kernel.family, crate::continuous::KernelFamily::Polynomial) {
            cuts.extend((1..=24).map(|k| d.lo() + d.width() * 0.5f64.powi(k)));
        }
        cuts.retain(|c| d.contains(*c));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .flat_map(|w| kronrod_rule(w[0], w[1]))
            .collect()
    }

    /// Worker responses under one deployed smooth policy.
    pub fn responder(&self, policy: SmoothPolicy) -> Responder<'_> {
        let nodes: Vec<SignalNode> = self
            .signal_rule(&policy)
            .into_iter()
            .map(|(x, w)| SignalNode {
                x,
                w,
                f: policy.value(x),
                df: policy.d_theta(x),
            })
            .collect();
        let mut r = Responder {
            model: self,
            policy,
            nodes,
            incentive: Vec::new(),
        };
        r.incentive = self
            .response_domain
            .grid(RESPONSE_TABLE)
            .map(|y| r.incentive_direct(y))
            .collect();
        r
    }
}

#[derive(Debug, Clone, Copy)]
struct SignalNode {
    x: f64,
    w: f64,
    f: f64,
    df: f64,
}

/// Response map `G_theta` and its derivative for a fixed policy.
#[derive(Debug, Clone)]
pub struct Responder<'a> {
    model: &'a ResponseModel,
    policy: SmoothPolicy,
    nodes: Vec<SignalNode>,
    incentive: Vec<f64>,
}

impl Responder<'_> {
    pub fn policy(&self) -> SmoothPolicy {
        self.policy
    }

    /// `w int f(x) phi(x | y) dx` by quadrature.
    pub fn incentive_direct(&self, y: f64) -> f64 {
        let k = &self.model.kernel;
        self.model.wage * self.nodes.iter().map(|n| n.w * n.f * k.pdf(n.x, y)).sum::<f64>()
    }

    fn incentive(&self, y: f64) -> f64 {
        if self.model.response_domain.contains(y) {
            catmull_rom(&self.incentive, self.model.response_domain, y)
        } else {
            self.incentive_direct(y)
        }
    }

    /// `G_theta(y)`, the worker's best post-response skill.
    pub fn response(&self, y: f64) -> f64 {
        let hi = self.model.response_domain.hi();
        let Ok(domain) = Interval::new(y, hi) else {
            return y;
        };
        let c = self.model.cost_scale;
        let tol = Tolerances {
            opt_tol: 1e-10,
            ..self.model.tol
        };
        maximize_1d(|yn| self.incentive(yn) - 0.5 * c * (yn - y) * (yn - y), domain, RESPONSE_GRID, &tol).0
    }

    /// `d G_theta(y) / d theta` from the implicit function theorem.
    pub fn argmax_grad(&self, y: f64) -> Result<f64> {
        let g = self.response(y);
        self.argmax_grad_at(y, g)
    }

    fn argmax_grad_at(&self, y: f64, g: f64) -> Result<f64> {
        let hi = self.model.response_domain.hi();
        if g - y < BOUNDARY_GAP || hi - g < BOUNDARY_GAP {
            return Ok(0.0);
        }
        let k = &self.model.kernel;
        let (mut a, mut b) = (0.0, 0.0);
        for n in &self.nodes {
            let p = k.pdf(n.x, g);
            if p == 0.0 {
                continue;
            }
            let s = k.score(n.x, g);
            a += n.w * n.df * p * s;
            b += n.w * n.f * p * (k.score_derivative(n.x, g) + s * s);
        }
        let w = self.model.wage;
        let coefficient = w * b - self.model.cost_scale;
        if coefficient.abs() <= 1e-8 {
            return Err(Error::DegenerateResponse { at: y, coefficient });
        }
        Ok(-(w * a) / coefficient)
    }

    /// `L(theta) = E_y E_{x | G(y)} l(f(x), G(y))` by nested adaptive
    /// quadrature to `quad_tol`.
    pub fn loss_quadrature(&self, loss: &dyn Loss) -> f64 {
        let model = self.model;
        let k = &model.kernel;
        let integrand = |y: f64| {
            let g = self.response(y);
            let inner = integrate_best_effort(
                |x| loss.value(self.policy.value(x), g) * k.pdf(x, g),
                k.domain,
                &k.kinks(g),
                &model.tol,
            );
            model.skill.pdf(y) * inner.unwrap_or(f64::NAN)
        };
        integrate_best_effort(integrand, model.skill.support(), &[], &model.tol).unwrap_or(f64::NAN)
    }

    /// REINFORCE estimate of the loss gradient over `ys`. Signals for each
    /// skill are drawn by stratified inversion from the child stream
    /// `stream.child(i)`.
    pub fn reinforce_grad(&self, loss: &dyn Loss, ys: &[f64], n_inner: usize, stream: RngStream) -> Result<GradientEstimate> {
        if ys.is_empty() {
            return Err(Error::Estimation("empty batch".into()));
        }
        let n_inner = n_inner.max(1);
        let samples: Vec<Option<Sample>> = ys
            .par_iter()
            .enumerate()
            .map(|(i, &y)| self.sample(loss, y, n_inner, stream.child(i as u64)).ok())
            .collect();
        let used: Vec<&Sample> = samples.iter().flatten().collect();
        if used.is_empty() {
            return Err(Error::Estimation(format!(
                "all {} samples had a degenerate worker response",
                ys.len()
            )));
        }
        let n = used.len() as f64;
        let mean = |f: fn(&Sample) -> f64| used.iter().map(|s| f(s)).sum::<f64>() / n;
        let (g1, g2, g3) = (mean(|s| s.g1), mean(|s| s.g2), mean(|s| s.g3));
        let total = g1 + g2 + g3;
        let var = if used.len() > 1 {
            used.iter().map(|s| (s.g1 + s.g2 + s.g3 - total).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(GradientEstimate {
            g1,
            g2,
            g3,
            total,
            loss: mean(|s| s.loss),
            std_error: (var / n).sqrt(),
            n_outer: used.len(),
            n_inner,
            dropped: ys.len() - used.len(),
        })
    }

    fn sample(&self, loss: &dyn Loss, y: f64, n_inner: usize, stream: RngStream) -> Result<Sample> {
        let g = self.response(y);
        let dg = self.argmax_grad_at(y, g)?;
        let k = &self.model.kernel;
        let mut rng = stream.rng();
        let mut s = Sample::default();
        for j in 0..n_inner {
            let u = (j as f64 + rng.random::<f64>()) / n_inner as f64;
            let x = k.quantile(u, g);
            let f = self.policy.value(x);
            let l = loss.value(f, g);
            s.g1 += self.policy.d_theta(x) * loss.d_prediction(f, g);
            s.g2 += dg * loss.d_outcome(f, g);
            if dg != 0.0 {
                s.g3 += dg * l * k.score(x, g);
            }
            s.loss += l;
        }
        let m = n_inner as f64;
        s.g1 /= m;
        s.g2 /= m;
        s.g3 /= m;
        s.loss /= m;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    g1: f64,
    g2: f64,
    g3: f64,
    loss: f64,
}

/// Batch gradient estimate split into its three components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientEstimate {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub total: f64,
    /// Mean loss over the batch.
    pub loss: f64,
    pub std_error: f64,
    pub n_outer: usize,
    pub n_inner: usize,
    /// Samples skipped for a degenerate worker response.
    pub dropped: usize,
}
