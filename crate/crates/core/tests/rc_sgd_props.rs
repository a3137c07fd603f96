use proptest::prelude::*;
use strategic_labor::continuous::{
    BaseUtility, ContinuousMarket, CostSpec, KernelFamily, MarketSpec, Production, SkillSpec, UtilitySpec,
    WageStructure,
};
use strategic_labor::numerics::RngStream;
use strategic_labor::policy::Group;
use strategic_labor::rc_sgd::{rsgd_run, EmployerLoss, ResponseModel, SgdConfig, SgdMode, SmoothPolicy};

fn market(a: f64, w: f64, c: f64) -> ContinuousMarket {
    ContinuousMarket::new(MarketSpec {
        skill: SkillSpec::Uniform { lo: 0.0, hi: 1.0 },
        kernel: KernelFamily::Polynomial,
        utility: UtilitySpec {
            base: BaseUtility::Linear { slope: a, intercept: -1.0 },
            production: Production::Identity,
        },
        wage: WageStructure::Flat { wage: w },
        cost: CostSpec::quadratic(c),
        lambda_maj: 1.0,
    })
    .unwrap()
}

fn loss(a: f64) -> EmployerLoss {
    EmployerLoss {
        base: BaseUtility::Linear { slope: a, intercept: -1.0 },
    }
}

fn skills(model: &ResponseModel, n: usize, stream: RngStream) -> Vec<f64> {
    model.skill.sample(n, stream)
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn static_workers_leave_only_the_direct_term(theta in 0.05..0.95f64, a in 1.0..6.0f64, seed in any::<u64>()) {
        let m = market(a, 0.0, 5.0);
        let model = ResponseModel::from_market(&m).unwrap();
        let responder = model.responder(SmoothPolicy::new(theta, 0.02).unwrap());
        let root = RngStream::new(seed, 0);
        let (mut g2, mut g3) = (Vec::new(), Vec::new());
        for k in 0..30 {
            let ys = skills(&model, 50, root.child(2 * k));
            let est = responder.reinforce_grad(&loss(a), &ys, 8, root.child(2 * k + 1)).unwrap();
            g2.push(est.g2);
            g3.push(est.g3);
        }
        for (name, xs) in [("g2", &g2), ("g3", &g3)] {
            let (mean, se) = mean_and_se(xs);
            prop_assert!(mean.abs() <= 3.0 * se, "{}: mean {} se {}", name, mean, se);
        }
    }

    #[test]
    fn identical_config_gives_identical_trajectories(seed in any::<u64>(), theta0 in 0.0..1.0f64) {
        let m = market(2.0, 1.0, 5.0);
        let model = ResponseModel::from_market(&m).unwrap();
        let cfg = SgdConfig { rounds: 5, n_outer: 40, n_inner: 4, population: 200, ..SgdConfig::default() };
        for mode in [SgdMode::Performative, SgdMode::Naive] {
            let a = rsgd_run(&model, theta0, &loss(2.0), &cfg, mode, RngStream::new(seed, 0)).unwrap();
            let b = rsgd_run(&model, theta0, &loss(2.0), &cfg, mode, RngStream::new(seed, 0)).unwrap();
            let bits = |s: &[strategic_labor::rc_sgd::SgdStep]| {
                s.iter().map(|x| (x.theta.to_bits(), x.loss_estimate.to_bits())).collect::<Vec<_>>()
            };
            prop_assert_eq!(bits(&a), bits(&b));
        }
    }
}

#[test]
fn standard_error_shrinks_like_inverse_root_n() {
    let m = market(2.0, 1.0, 5.0);
    let model = ResponseModel::from_market(&m).unwrap();
    for (k, theta) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let responder = model.responder(SmoothPolicy::new(theta, 0.02).unwrap());
        let points: Vec<(f64, f64)> = [100usize, 1000, 10_000]
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let stream = RngStream::new(11, k as u64).child(j as u64);
                let ys = skills(&model, n, stream.child(0));
                let est = responder.reinforce_grad(&loss(2.0), &ys, 16, stream.child(1)).unwrap();
                ((n as f64).ln(), est.std_error.ln())
            })
            .collect();
        let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 0.5).abs() <= 0.1, "theta {theta}: slope {slope}");
    }
}

#[test]
fn smooth_responses_approach_the_threshold_response() {
    let m = market(2.0, 1.0, 5.0);
    let model = ResponseModel::from_market(&m).unwrap();
    for theta in [0.2, 0.4, 0.6, 0.8] {
        let worst = |tau: f64| {
            let r = model.responder(SmoothPolicy::new(theta, tau).unwrap());
            (0..=50)
                .map(|i| {
                    let y = i as f64 / 50.0;
                    (r.response(y) - m.worker_best_response(Group::Maj, theta, y)).abs()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (worst(0.05), worst(0.01));
        assert!(fine < 2e-2, "theta {theta}: error {fine} at temperature 0.01");
        assert!(fine <= coarse, "theta {theta}: {fine} > {coarse}");
    }
}
