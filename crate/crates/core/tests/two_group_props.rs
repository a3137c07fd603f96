use proptest::prelude::*;
use strategic_labor::coate_loury::{CoateLoury, CostModel, MarketParams, SignalModel};
use strategic_labor::numerics::Density;
use strategic_labor::policy::PolicyPair;
use strategic_labor::two_group::{TwoGroupMarket, DEFAULT_REPORT_TOL};

fn market(s1: f64, wage: f64, p: f64, m_g: f64, lambda: f64) -> TwoGroupMarket {
    let signal = SignalModel::new(Density::LinearRamp { slope: -s1 }, Density::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
    let cost = CostModel::new(Density::Uniform { lo: 0.0, hi: m_g }).unwrap();
    let cl = CoateLoury::new(signal, cost, MarketParams::new(wage, p, p).unwrap());
    TwoGroupMarket::new(cl, lambda).unwrap()
}

fn markets() -> impl Strategy<Value = TwoGroupMarket> {
    (0.2..2.0f64, 0.5..5.0f64, 0.5..5.0f64, 0.1..2.0f64, 0.05..0.95f64)
        .prop_map(|(s1, w, p, m, l)| market(s1, w, p, m, l))
}

fn grid_max_1d(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        if f(t) > best {
            (arg, best) = (t, f(t));
        }
    }
    arg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pooled_optimum_separates(tg in markets()) {
        // Joint grid maximization, then alternating refinement.
        let n = 400;
        let (mut a, mut b, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 0..=n {
            for j in 0..=n {
                let p = PolicyPair::new(i as f64 / n as f64, j as f64 / n as f64);
                let v = tg.pooled_utility(p);
                if v > best {
                    (a, b, best) = (p.theta_maj, p.theta_min, v);
                }
            }
        }
        let fine = 100_000;
        let window = |c: f64, f: &dyn Fn(f64) -> f64| {
            (0..=2000)
                .map(|k| (c - 1.0 / n as f64 + 2.0 * k as f64 / (2000.0 * n as f64)).clamp(0.0, 1.0))
                .fold((c, f(c)), |acc, t| if f(t) > acc.1 { (t, f(t)) } else { acc })
                .0
        };
        for _ in 0..2 {
            a = window(a, &|t| tg.pooled_utility(PolicyPair::new(t, b)));
            b = window(b, &|t| tg.pooled_utility(PolicyPair::new(a, t)));
        }
        let single = grid_max_1d(|t| tg.market.perf_utility(t), fine);
        let opt = tg.market.find_optimal(512);
        prop_assume!(opt.unique);
        prop_assert!((a - single).abs() < 1e-4, "joint {} single {}", a, single);
        prop_assert!((b - single).abs() < 1e-4, "joint {} single {}", b, single);
        prop_assert!((opt.theta - single).abs() < 1e-4);
    }

    #[test]
    fn stable_pair_components_are_fixed_points(tg in markets()) {
        for p in tg.stable_pairs(512) {
            for t in [p.theta_maj, p.theta_min] {
                prop_assert!(tg.market.stable_residual(t) < 5e-3);
            }
        }
    }

    #[test]
    fn relabeling_preserves_gaps_and_pairs(tg in markets()) {
        let swapped = tg.relabeled();
        let mut pairs = tg.stable_pairs(512);
        let mut other: Vec<PolicyPair> = swapped.stable_pairs(512).iter().map(|p| p.swapped()).collect();
        let key = |p: &PolicyPair| (p.theta_maj.to_bits(), p.theta_min.to_bits());
        pairs.sort_by_key(key);
        other.sort_by_key(key);
        prop_assert_eq!(&pairs, &other);
        for p in pairs {
            let r = tg.equity_report(p, DEFAULT_REPORT_TOL);
            let s = swapped.equity_report(p.swapped(), DEFAULT_REPORT_TOL);
            prop_assert_eq!(r.gap, s.gap);
            prop_assert!((r.pooled_utility - s.pooled_utility).abs() < 1e-12);
        }
    }
}
