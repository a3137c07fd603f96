use proptest::prelude::*;
use strategic_labor::numerics::{find_roots_1d, integrate, maximize_1d, Density, Interval, RngStream, Tolerances};

fn horner(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn antiderivative(coef: &[f64], x: f64) -> f64 {
    coef.iter().enumerate().map(|(k, c)| c * x.powi(k as i32 + 1) / (k as f64 + 1.0)).sum()
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i as f64 + 1.0) / n).abs())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn quadrature_is_exact_on_polynomials(
        coef in prop::collection::vec(-1.0..1.0f64, 1..=11),
        a in 0.0..1.0f64,
        b in 0.0..1.0f64,
    ) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let got = integrate(|x| horner(&coef, x), Interval::new(lo, hi).unwrap(), &Tolerances::default()).unwrap();
        let exact = antiderivative(&coef, hi) - antiderivative(&coef, lo);
        prop_assert!((got - exact).abs() <= 1e-12, "got {} exact {}", got, exact);
    }

    #[test]
    fn argmax_is_invariant_under_increasing_maps(c in prop::array::uniform4(-3.0..3.0f64)) {
        let f = |x: f64| horner(&c, x);
        let tol = Tolerances::default();
        let (a, _) = maximize_1d(f, Interval::UNIT, 512, &tol);
        let (b, _) = maximize_1d(|x| f(x).exp(), Interval::UNIT, 512, &tol);
        prop_assert!((a - b).abs() < 1e-5, "{} vs {}", a, b);
    }

    #[test]
    fn all_simple_roots_are_found(mut roots in prop::collection::vec(0.02..0.98f64, 1..=4)) {
        roots.sort_by(f64::total_cmp);
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] > 0.02));
        let p = |x: f64| roots.iter().map(|r| x - r).product::<f64>();
        let tol = Tolerances::default();
        let found = find_roots_1d(p, Interval::UNIT, 512, &tol);
        prop_assert_eq!(found.len(), roots.len(), "found {:?} expected {:?}", found, roots);
        for (f, r) in found.iter().zip(&roots) {
            prop_assert!((f - r).abs() < 1e-6, "found {} expected {}", f, r);
        }
    }
}

#[test]
fn sampling_matches_every_catalog_cdf() {
    let catalog = [
        Density::Uniform { lo: -1.0, hi: 3.0 },
        Density::Gaussian {
            mean: 0.5,
            sd: 2.0,
            truncation: 8.0,
        },
        Density::Gaussian {
            mean: 0.0,
            sd: 1.0,
            truncation: 1.5,
        },
        Density::Power { exponent: 8.0 },
        Density::Power { exponent: 0.5 },
        Density::LinearRamp { slope: 0.1 },
        Density::LinearRamp { slope: -2.0 },
    ];
    for (k, d) in catalog.iter().enumerate() {
        let xs = d.sample(100_000, RngStream::new(7, k as u64));
        let ks = ks_statistic(xs, |x| d.cdf(x));
        assert!(ks < 0.01, "{d:?}: KS statistic {ks}");
    }
}

#[test]
fn catalog_cdfs_agree_with_quadrature_of_pdfs() {
    let tol = Tolerances::default();
    let catalog = [
        Density::Uniform { lo: -1.0, hi: 3.0 },
        Density::Power { exponent: 3.0 },
        Density::LinearRamp { slope: 1.5 },
    ];
    for d in catalog {
        let s = d.support();
        for i in 1..10 {
            let x = s.lo() + s.width() * i as f64 / 10.0;
            let q = integrate(|t| d.pdf(t), Interval::new(s.lo(), x).unwrap(), &tol).unwrap();
            assert!((q - d.cdf(x)).abs() < 1e-10, "{d:?} at {x}");
        }
    }
}
