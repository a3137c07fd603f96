//! One-dimensional numerical toolkit: quadrature, grid-then-golden
//! maximization, bracketing root finding, and seeded sampling.
//!
//! Everything here is deterministic given its inputs. Randomness only enters
//! through an explicit [`RngStream`].

mod density;
mod optimize;
mod quadrature;
mod rng;
mod roots;

pub use density::{normal_cdf, normal_pdf, normal_quantile, Density};
pub use optimize::{golden_section_max, maximize_1d, near_optimal_peaks};
pub use quadrature::{integrate, integrate_best_effort, integrate_with_breaks, kronrod_rule};
pub use rng::RngStream;
pub use roots::{bisect, find_roots_1d};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "interval requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// `n + 1` equispaced points from `lo` to `hi` inclusive.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let n = n.max(1);
        let step = self.width() / n as f64;
        (0..=n).map(move |i| if i == n { self.hi } else { self.lo + step * i as f64 })
    }
}

/// Accuracy targets shared by the numerical routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute error target for quadrature.
    pub quad_tol: f64,
    /// Argument tolerance for 1-D maximization.
    pub opt_tol: f64,
    /// Residual tolerance for root finding.
    pub root_tol: f64,
    /// Step size below which fixed-point iterations are considered converged.
    pub fixed_point_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: 1e-8,
            opt_tol: 1e-6,
            root_tol: 1e-8,
            fixed_point_tol: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("quad_tol", self.quad_tol),
            ("opt_tol", self.opt_tol),
            ("root_tol", self.root_tol),
            ("fixed_point_tol", self.fixed_point_tol),
        ];
        for (key, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(
                    format!("numerics.tolerances.{key}"),
                    format!("must be strictly positive, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

/// Catmull-Rom interpolation of equispaced samples over `domain`.
pub fn catmull_rom(values: &[f64], domain: Interval, x: f64) -> f64 {
    let n = values.len() - 1;
    let step = domain.width() / n as f64;
    let t = ((x - domain.lo()) / step).clamp(0.0, n as f64);
    let i = (t.floor() as usize).min(n - 1);
    let f = t - i as f64;
    let p1 = values[i];
    let p2 = values[i + 1];
    let p0 = if i == 0 { 2.0 * p1 - p2 } else { values[i - 1] };
    let p3 = if i + 1 == n { 2.0 * p2 - p1 } else { values[i + 2] };
    let f2 = f * f;
    let f3 = f2 * f;
    0.5 * (2.0 * p1 + (p2 - p0) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f2 + (3.0 * p1 - p0 - 3.0 * p2 + p3) * f3)
}

