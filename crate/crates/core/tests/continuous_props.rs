use proptest::prelude::*;
use rayon::prelude::*;
use strategic_labor::continuous::{
    BaseUtility, ContinuousMarket, CostKind, CostSpec, KernelFamily, MarketSpec, Production, SkillSpec, UtilitySpec,
    WageStructure,
};
use strategic_labor::policy::{Group, PolicyPair};
use strategic_labor::runner::{run_equilibrium, Equilibria};
use strategic_labor::scenario::{ModelKind, ScenarioConfig, PRESETS};

fn linear_flat(a: f64, w: f64, c: f64) -> MarketSpec {
    MarketSpec {
        skill: SkillSpec::Uniform { lo: 0.0, hi: 1.0 },
        kernel: KernelFamily::Polynomial,
        utility: UtilitySpec {
            base: BaseUtility::Linear { slope: a, intercept: -1.0 },
            production: Production::Identity,
        },
        wage: WageStructure::Flat { wage: w },
        cost: CostSpec::quadratic(c),
        lambda_maj: 1.0,
    }
}

fn gaussian(slope: f64, sd_y: f64, sd_x: f64, c: f64) -> MarketSpec {
    MarketSpec {
        skill: SkillSpec::Gaussian { mean: 0.0, sd: sd_y },
        kernel: KernelFamily::Gaussian { sd: sd_x },
        utility: UtilitySpec {
            base: BaseUtility::Linear { slope, intercept: 0.0 },
            production: Production::Identity,
        },
        wage: WageStructure::Nash,
        cost: CostSpec {
            kind: CostKind::Quadratic,
            scale: c,
            scale_maj: None,
            scale_min: None,
        },
        lambda_maj: 1.0,
    }
}

fn improvements(m: &ContinuousMarket, theta: f64) -> Vec<(f64, f64)> {
    (0..=40)
        .map(|i| {
            let y = i as f64 / 40.0;
            (y, m.worker_best_response(Group::Maj, theta, y))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn responses_improve_and_are_monotone(a in 1.0..8.0f64, w in 0.2..2.0f64, c in 1.0..12.0f64, theta in 0.05..0.95f64) {
        let m = ContinuousMarket::new(linear_flat(a, w, c)).unwrap();
        let ys = improvements(&m, theta);
        for &(y, yp) in &ys {
            prop_assert!(yp >= y, "Y+({}) = {}", y, yp);
        }
        for pair in ys.windows(2) {
            prop_assert!(pair[1].1 >= pair[0].1 - 1e-6, "Y+ falls between {:?} and {:?}", pair[0], pair[1]);
        }
    }

    #[test]
    fn costlier_improvement_shrinks_gains(a in 1.0..8.0f64, w in 0.2..2.0f64, c in 1.0..12.0f64, factor in 1.1..3.0f64, theta in 0.05..0.95f64) {
        let cheap = ContinuousMarket::new(linear_flat(a, w, c)).unwrap();
        let dear = ContinuousMarket::new(linear_flat(a, w, c * factor)).unwrap();
        for ((y, lo_cost), (_, hi_cost)) in improvements(&cheap, theta).into_iter().zip(improvements(&dear, theta)) {
            let (gain_cheap, gain_dear) = (lo_cost - y, hi_cost - y);
            prop_assert!(gain_dear <= gain_cheap + 1e-9, "y {}: {} > {}", y, gain_dear, gain_cheap);
            if gain_dear > 1e-6 {
                prop_assert!(gain_dear < gain_cheap, "y {}: gain did not shrink", y);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gaussian_wages_follow_the_shrinkage_formula(sd_y in 0.5..2.0f64, sd_x in 0.5..2.0f64, theta in -1.5..1.5f64) {
        let m = ContinuousMarket::new(gaussian(1.0, sd_y, sd_x, 20.0)).unwrap();
        let shrink = 1.0 + sd_x * sd_x / (sd_y * sd_y);
        for i in 0..25 {
            let x = theta + 4.0 * i as f64 / 24.0;
            let got = m.nash_wage(theta, x).unwrap();
            prop_assert!((got - x / shrink).abs() < 1e-3, "x {}: {} vs {}", x, got, x / shrink);
        }
        prop_assert_eq!(m.nash_wage(theta, theta - 0.1).unwrap(), 0.0);
    }

    #[test]
    fn nash_wages_break_even(slope in 0.5..20.0f64, sd_x in 0.5..2.0f64, theta in -1.5..1.5f64) {
        let m = ContinuousMarket::new(gaussian(slope, 1.0, sd_x, 20.0)).unwrap();
        let r = m.zero_profit_residual(PolicyPair::uniform(theta));
        prop_assert!(r.abs() < 1e-3 * slope.max(1.0), "residual {}", r);
    }
}

#[test]
fn optimal_utility_dominates_stable_in_every_preset() {
    let failures: Vec<String> = PRESETS
        .par_iter()
        .flat_map_iter(|(id, _)| {
            let cfg = ScenarioConfig::preset(id).unwrap();
            let report = run_equilibrium(&cfg).unwrap();
            let mut bad = Vec::new();
            match (&report.equilibria, cfg.model) {
                (Equilibria::Continuous { optimal, stable, .. }, ModelKind::Continuous) => {
                    let m = cfg.continuous_market().unwrap();
                    let u_opt = m.employer_perf_utility(optimal.pair);
                    assert!(!stable.is_empty(), "{id}: no stable point");
                    for s in stable {
                        let u = m.employer_perf_utility(s.pair);
                        if u > u_opt + 1e-9 {
                            bad.push(format!("{id}: stable {:?} utility {u} above optimum {u_opt}", s.pair));
                        }
                    }
                }
                (Equilibria::CoateLoury { optimal, stable, .. }, _) => {
                    let m = cfg.coate_loury_market().unwrap();
                    let u_opt = m.perf_utility(optimal[0].theta);
                    for s in stable {
                        if m.perf_utility(s.theta) > u_opt + 1e-9 {
                            bad.push(format!("{id}: stable {} above optimum", s.theta));
                        }
                    }
                }
                (Equilibria::TwoGroup { optimal, stable, .. }, _) => {
                    let tg = cfg.two_group_market().unwrap();
                    let u_opt = tg.pooled_utility(optimal[0].pair);
                    for s in stable {
                        if tg.pooled_utility(s.pair) > u_opt + 1e-9 {
                            bad.push(format!("{id}: stable {:?} above optimum", s.pair));
                        }
                    }
                }
                _ => bad.push(format!("{id}: report does not match model")),
            }
            bad
        })
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}
