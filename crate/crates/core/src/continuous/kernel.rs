use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{normal_cdf, normal_pdf, Interval};

fn default_sd() -> f64 {
    1.0
}

/// Conditional signal density `phi(x | y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelFamily {
    /// `(y + 1) x^y` on `[0, 1]`, defined for `y > -1`.
    Polynomial,
    /// `N(y, sd^2)` truncated to the signal domain and renormalized.
    Gaussian {
        #[serde(default = "default_sd")]
        sd: f64,
    },
}

/// A kernel family together with its signal domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalKernel {
    pub family: KernelFamily,
    pub domain: Interval,
}

/// Probability mass of a standard normal on `[a, b]`, using the upper tail
/// when both ends are positive to avoid cancellation.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

impl SignalKernel {
    pub fn polynomial() -> Self {
        Self {
            family: KernelFamily::Polynomial,
            domain: Interval::UNIT,
        }
    }

    pub fn gaussian(sd: f64, domain: Interval) -> Self {
        Self {
            family: KernelFamily::Gaussian { sd },
            domain,
        }
    }

    fn gaussian_terms(&self, sd: f64, y: f64) -> (f64, f64, f64) {
        let a = (self.domain.lo() - y) / sd;
        let b = (self.domain.hi() - y) / sd;
        (a, b, normal_mass(a, b))
    }

    pub fn pdf(&self, x: f64, y: f64) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        match self.family {
            KernelFamily::Polynomial => (y + 1.0) * x.powf(y),
            KernelFamily::Gaussian { sd } => {
                let (_, _, z) = self.gaussian_terms(sd, y);
                normal_pdf((x - y) / sd) / (sd * z)
            }
        }
    }

    /// Hire probability `P(X >= theta | y)`.
    pub fn sf(&self, theta: f64, y: f64) -> f64 {
        if theta <= self.domain.lo() {
            return 1.0;
        }
        if theta >= self.domain.hi() {
            return 0.0;
        }
        let v = match self.family {
            KernelFamily::Polynomial => 1.0 - theta.powf(y + 1.0),
            KernelFamily::Gaussian { sd } => {
                let (_, b, z) = self.gaussian_terms(sd, y);
                normal_mass((theta - y) / sd, b) / z
            }
        };
        v.clamp(0.0, 1.0)
    }

    /// `d/dy log phi(x | y)`.
    pub fn score(&self, x: f64, y: f64) -> f64 {
        match self.family {
            KernelFamily::Polynomial => 1.0 / (y + 1.0) + x.ln(),
            KernelFamily::Gaussian { sd } => {
                let (a, b, z) = self.gaussian_terms(sd, y);
                (x - y) / (sd * sd) - (normal_pdf(a) - normal_pdf(b)) / (sd * z)
            }
        }
    }

    /// `d^2/dy^2 log phi(x | y)`.
    pub fn score_derivative(&self, _x: f64, y: f64) -> f64 {
        match self.family {
            KernelFamily::Polynomial => -1.0 / ((y + 1.0) * (y + 1.0)),
            KernelFamily::Gaussian { sd } => {
                let (a, b, z) = self.gaussian_terms(sd, y);
                let n = normal_pdf(a) - normal_pdf(b);
                let dn = (a * normal_pdf(a) - b * normal_pdf(b)) / (sd * sd * z);
                -1.0 / (sd * sd) - (dn - (n / (sd * z)).powi(2))
            }
        }
    }

    /// Antiderivatives in `x` of `phi(x | y)` and `x phi(x | y)`, for exact
    /// integrals of piecewise-linear functions against the kernel.
    pub(super) fn antiderivatives(&self, x: f64, y: f64) -> (f64, f64) {
        let x = self.domain.clamp(x);
        match self.family {
            KernelFamily::Polynomial => {
                let p = x.powf(y + 1.0);
                (p, (y + 1.0) / (y + 2.0) * p * x)
            }
            KernelFamily::Gaussian { sd } => {
                let (_, _, z) = self.gaussian_terms(sd, y);
                let t = (x - y) / sd;
                let c = normal_cdf(t);
                (c / z, (y * c - sd * normal_pdf(t)) / z)
            }
        }
    }

    /// Inverse conditional CDF.
    pub fn quantile(&self, p: f64, y: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let x = match self.family {
            KernelFamily::Polynomial => p.powf(1.0 / (y + 1.0)),
            KernelFamily::Gaussian { sd } => {
                let (a, _, z) = self.gaussian_terms(sd, y);
                let lower = normal_cdf(a);
                y + sd * crate::numerics::normal_quantile((lower + p * z).clamp(0.0, 1.0))
            }
        };
        self.domain.clamp(x)
    }

    pub fn draw<R: Rng + ?Sized>(&self, y: f64, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>(), y)
    }

    /// Points where `phi(. | y)` is not smooth in `x`, for quadrature breaks.
    pub fn kinks(&self, y: f64) -> Vec<f64> {
        match self.family {
            KernelFamily::Polynomial => vec![],
            KernelFamily::Gaussian { .. } => vec![self.domain.clamp(y)],
        }
    }
}
