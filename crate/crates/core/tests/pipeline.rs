use sc_rates::construction::{
    build_distribution, code_to_hypothesis, reconstruct, sample_sign_matrix,
};
use sc_rates::estimators::{
    erm_blockwise, monte_carlo, reachable_min_true_risk, uc_sup_exact, Measure, TrialRunner,
};
use sc_rates::model::{empirical_risk, sample_dataset, true_risk};
use sc_rates::{BlockGeometry, Variant};

fn geometries() -> Vec<BlockGeometry> {
    [
        (64, 2, Variant::OrderIndependent),
        (300, 3, Variant::OrderIndependent),
        (64, 2, Variant::OrderDependent),
        (1000, 4, Variant::OrderDependent),
    ]
    .into_iter()
    .map(|(n, k, v)| BlockGeometry::new(n, k, v).unwrap())
    .collect()
}

#[test]
fn erm_sits_between_reachable_minimum_and_sup() {
    for g in geometries() {
        for seed in 0..25 {
            let sigma = sample_sign_matrix(&g, seed);
            let p = build_distribution(&sigma, &g).unwrap();
            let sample = sample_dataset(&p, g.n(), seed ^ 0xabcd).unwrap();
            let erm = erm_blockwise(&sample, &g).unwrap();
            assert_eq!(reconstruct(&erm.compression_set, &g).unwrap(), erm.code);

            let h = code_to_hypothesis(&erm.code, &g).unwrap();
            let risk = true_risk(&h, &p).unwrap();
            let emp = empirical_risk(&h, &sample).unwrap();
            assert_eq!(emp, erm.empirical_risk());

            let min = reachable_min_true_risk(&sample, &sigma, &g).unwrap();
            let sup = uc_sup_exact(&sample, &sigma, &g).unwrap();
            assert!(risk >= min - 1e-12);
            assert!((emp - risk).abs() <= sup + 1e-12);
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let run = |seed| {
        monte_carlo(
            Measure::UniformConvergence,
            256,
            4,
            Variant::OrderIndependent,
            40,
            seed,
        )
        .unwrap()
    };
    let (a, b, c) = (run(9), run(9), run(10));
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
    assert_eq!((a.m, a.trials, a.seed), (64, 40, 9));
}

#[test]
fn zero_margin_removes_excess() {
    for g in geometries() {
        let runner = TrialRunner::from_geometry(g).with_epsilon(0.0).unwrap();
        let est = runner.monte_carlo(Measure::AgnosticExcess, 30, 3).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.stderr, 0.0);
    }
}
