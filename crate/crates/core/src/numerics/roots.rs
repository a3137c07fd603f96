use super::{Interval, Tolerances};

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign. Returns `None` if the residual at the converged point still exceeds
/// `root_tol`, which happens at jump discontinuities.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, root_tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if !(mid > lo && mid < hi) {
            return (f_mid.abs() <= root_tol).then_some(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    (f(mid).abs() <= root_tol).then_some(mid)
}

/// All roots of `f` on `domain` detected as sign changes (or exact zeros) on a
/// grid of `grid_n + 1` points, refined by bisection. Sorted ascending.
pub fn find_roots_1d<F: FnMut(f64) -> f64>(mut f: F, domain: Interval, grid_n: usize, tol: &Tolerances) -> Vec<f64> {
    let xs: Vec<f64> = domain.grid(grid_n).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if vs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < xs.len() && vs[i + 1] != 0.0 && vs[i].is_finite() && vs[i + 1].is_finite() && (vs[i] < 0.0) != (vs[i + 1] < 0.0) {
            if let Some(r) = bisect(&mut f, xs[i], xs[i + 1], tol.root_tol) {
                roots.push(r);
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let tol = Tolerances::default();
        let r = find_roots_1d(|x| x - 0.5, Interval::UNIT, 64, &tol);
        assert_eq!(r, vec![0.5]);
        let r = find_roots_1d(|x| (x - 0.25) * (x - 0.75), Interval::UNIT, 64, &tol);
        assert_eq!(r, vec![0.25, 0.75]);
        let r = find_roots_1d(|x| (x - 0.3) * (x - 0.71), Interval::UNIT, 64, &tol);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.3).abs() < 1e-12 && (r[1] - 0.71).abs() < 1e-12);
        assert!(find_roots_1d(|_| 1.0, Interval::UNIT, 64, &tol).is_empty());
    }

    #[test]
    fn jump_is_not_a_root() {
        let tol = Tolerances::default();
        let r = find_roots_1d(|x| if x < 0.33 { -1.0 } else { 1.0 }, Interval::UNIT, 64, &tol);
        assert!(r.is_empty());
    }
}
