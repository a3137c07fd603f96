use super::{Interval, Tolerances};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `x_tol`. Returns `(arg, value)`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = score(f(c));
    let mut fd = score(f(d));
    for _ in 0..200 {
        if (b - a) <= x_tol {
            break;
        }
        // `>=` keeps the left point on ties, favouring smaller arguments.
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = score(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = score(f(d));
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn scan<F: FnMut(f64) -> f64>(f: &mut F, domain: Interval, grid_n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = domain.grid(grid_n).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| score(f(x))).collect();
    (xs, vs)
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, xs: &[f64], vs: &[f64], i: usize, x_tol: f64) -> (f64, f64) {
    let lo = xs[i.saturating_sub(1)];
    let hi = xs[(i + 1).min(xs.len() - 1)];
    let (arg, val) = golden_section_max(&mut *f, lo, hi, x_tol);
    if val > vs[i] {
        (arg, val)
    } else {
        (xs[i], vs[i])
    }
}

/// Grid scan over `grid_n + 1` equispaced points followed by golden-section
/// refinement around the best grid point. Ties on the grid go to the smallest
/// argument. Returns `(arg, value)`.
pub fn maximize_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    domain: Interval,
    grid_n: usize,
    tol: &Tolerances,
) -> (f64, f64) {
    let (xs, vs) = scan(&mut f, domain, grid_n);
    let mut best = 0;
    for (i, &v) in vs.iter().enumerate() {
        if v > vs[best] {
            best = i;
        }
    }
    refine(&mut f, &xs, &vs, best, tol.opt_tol)
}

/// All refined local maxima whose value lies within `band` of the global
/// maximum, sorted by argument. Peaks that refine to the same point within
/// `10 * opt_tol` are merged.
pub fn near_optimal_peaks<F: FnMut(f64) -> f64>(
    mut f: F,
    domain: Interval,
    grid_n: usize,
    tol: &Tolerances,
    band: f64,
) -> Vec<(f64, f64)> {
    let (xs, vs) = scan(&mut f, domain, grid_n);
    let n = xs.len();
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || vs[i] >= vs[i - 1];
        let right_ok = i + 1 == n || vs[i] >= vs[i + 1];
        // On a plateau only its left edge is kept.
        let plateau_interior = i > 0 && vs[i] == vs[i - 1];
        if left_ok && right_ok && !plateau_interior {
            peaks.push(refine(&mut f, &xs, &vs, i, tol.opt_tol));
        }
    }
    let top = peaks.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut kept: Vec<(f64, f64)> = peaks.into_iter().filter(|p| p.1 >= top - band).collect();
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    kept.dedup_by(|b, a| (b.0 - a.0).abs() <= 10.0 * tol.opt_tol);
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_quadratic() {
        let (x, v) = maximize_1d(|x| -(x - 0.3) * (x - 0.3), Interval::UNIT, 64, &Tolerances::default());
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn endpoint_maximum() {
        let (x, _) = maximize_1d(|x| x, Interval::UNIT, 64, &Tolerances::default());
        assert_eq!(x, 1.0);
        let (x, _) = maximize_1d(|x| -x, Interval::UNIT, 64, &Tolerances::default());
        assert_eq!(x, 0.0);
    }

    #[test]
    fn ties_go_to_smallest_argument() {
        let (x, _) = maximize_1d(|_| 1.0, Interval::UNIT, 64, &Tolerances::default());
        assert_eq!(x, 0.0);
    }

    #[test]
    fn two_equal_peaks_are_both_reported() {
        let f = |x: f64| -((x - 0.25) * (x - 0.75)).powi(2);
        let peaks = near_optimal_peaks(f, Interval::UNIT, 256, &Tolerances::default(), 1e-9);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].0 - 0.25).abs() < 1e-4);
        assert!((peaks[1].0 - 0.75).abs() < 1e-4);
    }
}
