//! Zero-profit wages: the posterior mean of worker utility given the signal.

use crate::error::{Error, Result};
use crate::numerics::{integrate_best_effort, Density, Interval, Tolerances};

use super::kernel::SignalKernel;
use super::utility::BaseUtility;

const TABLE_POINTS: usize = 4096;
const SCALE_GRID: usize = 64;

/// `num(x) = int u(y) phi(x|y) p(y) dy` and `den(x) = int phi(x|y) p(y) dy`,
/// both returned as `(num, den)`. Integrands are rescaled by their grid
/// maximum so far tails keep full relative precision.
pub(super) fn posterior_moments(
    x: f64,
    kernel: &SignalKernel,
    skill: &Density,
    base: &BaseUtility,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let support = skill.support();
    let weight = |y: f64| kernel.pdf(x, y) * skill.pdf(y);
    let scale = support.grid(SCALE_GRID).map(weight).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let breaks = base.breaks();
    let rel = Tolerances {
        quad_tol: 1e-11,
        ..*tol
    };
    let num = integrate_best_effort(|y| base.eval(y) * weight(y) / scale, support, &breaks, &rel)?;
    let den = integrate_best_effort(|y| weight(y) / scale, support, &breaks, &rel)?;
    Ok((num * scale, den * scale))
}

/// Posterior mean of `u(y)` given signal `x`, computed directly.
pub(super) fn posterior_mean(
    x: f64,
    kernel: &SignalKernel,
    skill: &Density,
    base: &BaseUtility,
    tol: &Tolerances,
) -> Result<f64> {
    let (num, den) = posterior_moments(x, kernel, skill, base, tol)?;
    if den <= 1e-12 {
        return Err(Error::UndefinedSignal { x });
    }
    Ok(num / den)
}

/// Tabulated posterior mean and its numerator over the signal domain.
#[derive(Debug, Clone)]
pub(super) struct NashTable {
    domain: Interval,
    step: f64,
    mean: Vec<f64>,
    numerator: Vec<f64>,
}

impl NashTable {
    pub(super) fn build(kernel: &SignalKernel, skill: &Density, base: &BaseUtility, tol: &Tolerances) -> Result<Self> {
        let domain = kernel.domain;
        let xs: Vec<f64> = domain.grid(TABLE_POINTS).collect();
        let mut mean = Vec::with_capacity(xs.len());
        let mut numerator = Vec::with_capacity(xs.len());
        for &x in &xs {
            let (num, den) = posterior_moments(x, kernel, skill, base, tol)?;
            numerator.push(num);
            mean.push(if den > 0.0 { num / den } else { f64::NAN });
        }
        // Signals no skill level can produce have no posterior; borrow the
        // nearest defined value so interpolation stays finite.
        let defined: Vec<usize> = (0..mean.len()).filter(|&i| mean[i].is_finite()).collect();
        if defined.is_empty() {
            return Err(Error::UndefinedSignal { x: domain.midpoint() });
        }
        for i in 0..mean.len() {
            if !mean[i].is_finite() {
                let j = defined.iter().copied().min_by_key(|&j| j.abs_diff(i)).unwrap_or(i);
                mean[i] = mean[j];
            }
        }
        Ok(Self {
            domain,
            step: domain.width() / TABLE_POINTS as f64,
            mean,
            numerator,
        })
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let t = ((x - self.domain.lo()) / self.step).clamp(0.0, TABLE_POINTS as f64);
        let i = (t.floor() as usize).min(TABLE_POINTS - 1);
        (i, t - i as f64)
    }

    fn node(&self, i: usize) -> f64 {
        self.domain.lo() + i as f64 * self.step
    }

    /// `int_a^b m(x) phi(x | y) dx` for `a, b` inside table cell `i`, exact
    /// for the interpolated `m`.
    fn cell_integral(&self, kernel: &SignalKernel, i: usize, a: f64, b: f64, y: f64) -> f64 {
        let slope = (self.mean[i + 1] - self.mean[i]) / self.step;
        let intercept = self.mean[i] - slope * self.node(i);
        let (a0, a1) = kernel.antiderivatives(a, y);
        let (b0, b1) = kernel.antiderivatives(b, y);
        intercept * (b0 - a0) + slope * (b1 - a1)
    }

    /// `tail[i] = int_{x_i}^hi m(x) phi(x | y) dx` at every table node.
    pub(super) fn tail(&self, kernel: &SignalKernel, y: f64) -> Vec<f64> {
        let anti: Vec<(f64, f64)> = (0..=TABLE_POINTS).map(|i| kernel.antiderivatives(self.node(i), y)).collect();
        let mut tail = vec![0.0; TABLE_POINTS + 1];
        for i in (0..TABLE_POINTS).rev() {
            let slope = (self.mean[i + 1] - self.mean[i]) / self.step;
            let intercept = self.mean[i] - slope * self.node(i);
            let cell = intercept * (anti[i + 1].0 - anti[i].0) + slope * (anti[i + 1].1 - anti[i].1);
            tail[i] = tail[i + 1] + cell;
        }
        tail
    }

    /// `int_theta^hi m(x) phi(x | y) dx` given `tail` for the same `y`.
    pub(super) fn incentive(&self, kernel: &SignalKernel, tail: &[f64], theta: f64, y: f64) -> f64 {
        if theta <= self.domain.lo() {
            return tail[0];
        }
        if theta >= self.domain.hi() {
            return 0.0;
        }
        let (i, _) = self.locate(theta);
        tail[i + 1] + self.cell_integral(kernel, i, theta, self.node(i + 1), y)
    }

    /// `int_theta^hi num(x) dx` by the trapezoid rule on the table.
    pub(super) fn expected_wage(&self, theta: f64) -> f64 {
        if theta >= self.domain.hi() {
            return 0.0;
        }
        let theta = theta.max(self.domain.lo());
        let (i, f) = self.locate(theta);
        let at_theta = self.numerator[i] + f * (self.numerator[i + 1] - self.numerator[i]);
        let mut total = 0.5 * (at_theta + self.numerator[i + 1]) * (1.0 - f) * self.step;
        for j in (i + 1)..TABLE_POINTS {
            total += 0.5 * (self.numerator[j] + self.numerator[j + 1]) * self.step;
        }
        total
    }
}
