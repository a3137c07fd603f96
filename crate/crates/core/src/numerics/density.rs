use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use super::{Interval, RngStream};
use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

fn default_hi() -> f64 {
    1.0
}

fn default_sd() -> f64 {
    1.0
}

fn default_truncation() -> f64 {
    8.0
}

/// One-dimensional densities with closed-form CDF and quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Density {
    /// Uniform on `[lo, hi]`.
    Uniform {
        #[serde(default)]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
    /// Normal density truncated to `mean ± truncation * sd` and renormalized.
    Gaussian {
        #[serde(default)]
        mean: f64,
        #[serde(default = "default_sd")]
        sd: f64,
        #[serde(default = "default_truncation")]
        truncation: f64,
    },
    /// `(k + 1) x^k` on `[0, 1]`.
    Power { exponent: f64 },
    /// `-a x + a/2 + 1` on `[0, 1]`, valid for `|a| <= 2`.
    LinearRamp { slope: f64 },
}

impl Density {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match *self {
            Density::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return bad(format!("uniform density needs lo < hi, got [{lo}, {hi}]"));
                }
            }
            Density::Gaussian { mean, sd, truncation } => {
                if !(mean.is_finite() && sd.is_finite() && sd > 0.0 && truncation.is_finite() && truncation > 0.0) {
                    return bad(format!(
                        "gaussian density needs finite mean and positive sd and truncation, got ({mean}, {sd}, {truncation})"
                    ));
                }
            }
            Density::Power { exponent } => {
                if !(exponent.is_finite() && exponent > -1.0) {
                    return bad(format!("power density needs exponent > -1, got {exponent}"));
                }
            }
            Density::LinearRamp { slope } => {
                if !(slope.is_finite() && slope.abs() <= 2.0) {
                    return bad(format!("linear ramp needs |slope| <= 2, got {slope}"));
                }
            }
        }
        Ok(())
    }

    pub fn support(&self) -> Interval {
        match *self {
            Density::Uniform { lo, hi } => Interval::new(lo, hi).unwrap_or(Interval::UNIT),
            Density::Gaussian { mean, sd, truncation } => {
                Interval::new(mean - truncation * sd, mean + truncation * sd).unwrap_or(Interval::UNIT)
            }
            Density::Power { .. } | Density::LinearRamp { .. } => Interval::UNIT,
        }
    }

    fn gaussian_mass(truncation: f64) -> f64 {
        1.0 - 2.0 * normal_cdf(-truncation)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return 0.0;
        }
        match *self {
            Density::Uniform { lo, hi } => 1.0 / (hi - lo),
            Density::Gaussian { mean, sd, truncation } => {
                normal_pdf((x - mean) / sd) / (sd * Self::gaussian_mass(truncation))
            }
            Density::Power { exponent } => (exponent + 1.0) * x.powf(exponent),
            Density::LinearRamp { slope } => -slope * x + 0.5 * slope + 1.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo() {
            return 0.0;
        }
        if x >= s.hi() {
            return 1.0;
        }
        let v = match *self {
            Density::Uniform { lo, hi } => (x - lo) / (hi - lo),
            Density::Gaussian { mean, sd, truncation } => {
                (normal_cdf((x - mean) / sd) - normal_cdf(-truncation)) / Self::gaussian_mass(truncation)
            }
            Density::Power { exponent } => x.powf(exponent + 1.0),
            Density::LinearRamp { slope } => -0.5 * slope * x * x + (0.5 * slope + 1.0) * x,
        };
        v.clamp(0.0, 1.0)
    }

    /// `1 - cdf(x)`, computed without cancellation where the family allows.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Density::Gaussian { mean, sd, truncation } if self.support().contains(x) => {
                ((normal_cdf(-(x - mean) / sd) - normal_cdf(-truncation)) / Self::gaussian_mass(truncation))
                    .clamp(0.0, 1.0)
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Derivative of the density in `x`, or `None` where it is unbounded.
    pub fn pdf_derivative(&self, x: f64) -> Option<f64> {
        if !self.support().contains(x) {
            return Some(0.0);
        }
        match *self {
            Density::Uniform { .. } => Some(0.0),
            Density::Gaussian { mean, sd, .. } => Some(-(x - mean) / (sd * sd) * self.pdf(x)),
            Density::Power { exponent } => {
                if exponent == 0.0 {
                    Some(0.0)
                } else if x == 0.0 && exponent < 1.0 {
                    None
                } else {
                    Some(exponent * (exponent + 1.0) * x.powf(exponent - 1.0))
                }
            }
            Density::LinearRamp { slope } => Some(-slope),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let s = self.support();
        let x = match *self {
            Density::Uniform { lo, hi } => lo + p * (hi - lo),
            Density::Gaussian { mean, sd, truncation } => {
                let q = normal_cdf(-truncation) + p * Self::gaussian_mass(truncation);
                mean + sd * normal_quantile(q)
            }
            Density::Power { exponent } => p.powf(1.0 / (exponent + 1.0)),
            Density::LinearRamp { slope } => {
                let b = 0.5 * slope + 1.0;
                let disc = (b * b - 2.0 * slope * p).max(0.0);
                2.0 * p / (b + disc.sqrt())
            }
        };
        s.clamp(x)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Density::Uniform { lo, hi } => 0.5 * (lo + hi),
            Density::Gaussian { mean, .. } => mean,
            Density::Power { exponent } => (exponent + 1.0) / (exponent + 2.0),
            Density::LinearRamp { slope } => 0.5 - slope / 12.0,
        }
    }

    /// One draw by inversion.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// `n` i.i.d. draws from `stream`.
    pub fn sample(&self, n: usize, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}
