use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_intercept() -> f64 {
    -1.0
}

fn default_cut() -> f64 {
    0.5
}

/// Employer value `u(y)` of a hired worker with skill `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseUtility {
    /// `slope * y + intercept`.
    Linear {
        slope: f64,
        #[serde(default = "default_intercept")]
        intercept: f64,
    },
    /// `1{y >= cut} - 1{y <= cut}`, which is zero at the cut.
    SignStep {
        #[serde(default = "default_cut")]
        cut: f64,
    },
}

impl BaseUtility {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            BaseUtility::Linear { slope, intercept } => slope * y + intercept,
            BaseUtility::SignStep { cut } => {
                if y > cut {
                    1.0
                } else if y < cut {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_increasing(&self) -> bool {
        match *self {
            BaseUtility::Linear { slope, .. } => slope > 0.0,
            BaseUtility::SignStep { .. } => true,
        }
    }

    /// Discontinuities of `u`.
    pub fn breaks(&self) -> Vec<f64> {
        match *self {
            BaseUtility::Linear { .. } => vec![],
            BaseUtility::SignStep { cut } => vec![cut],
        }
    }
}

/// Production `gamma(h)` applied to the pooled hire probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Production {
    Identity,
    /// `h^alpha`.
    Power { alpha: f64 },
}

impl Production {
    pub fn eval(&self, h: f64) -> f64 {
        match *self {
            Production::Identity => h,
            Production::Power { alpha } => h.max(0.0).powf(alpha),
        }
    }

    pub fn is_identity(&self) -> bool {
        match *self {
            Production::Identity => true,
            Production::Power { alpha } => alpha == 1.0,
        }
    }

    /// `gamma(h) / h`, with the `h -> 0` limit taken as 0 for `alpha > 1`
    /// and treated as 0 elsewhere since the product with `h` vanishes.
    pub fn ratio(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        match *self {
            Production::Identity => 1.0,
            Production::Power { alpha } => h.powf(alpha - 1.0),
        }
    }
}

/// Employer utility `u(y, h) = gamma(h) u(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySpec {
    pub base: BaseUtility,
    pub production: Production,
}

impl UtilitySpec {
    pub fn validate(&self) -> Result<()> {
        if let Production::Power { alpha } = self.production {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::InvalidArgument(format!("production exponent must be positive, got {alpha}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_production_endpoints() {
        for alpha in [0.5, 1.0, 2.0] {
            let p = Production::Power { alpha };
            assert_eq!(p.eval(0.0), 0.0);
            assert_eq!(p.eval(1.0), 1.0);
            assert!((p.ratio(0.3) * 0.3 - p.eval(0.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn sign_step_is_zero_at_cut() {
        let u = BaseUtility::SignStep { cut: 0.5 };
        assert_eq!(u.eval(0.5), 0.0);
        assert_eq!(u.eval(0.6), 1.0);
        assert_eq!(u.eval(0.4), -1.0);
    }
}
