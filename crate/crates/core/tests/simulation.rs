//! Orderings the benchmark should reproduce across the directional settings.

use mr_hetero::simulation::{run_benchmark, Method, SimConfig, SimMetrics};

fn run(preset: &str, runs: usize, methods: &[Method]) -> SimMetrics {
    let mut cfg = SimConfig::preset(preset).unwrap();
    cfg.n_runs = runs;
    run_benchmark(&cfg, methods).unwrap()
}

#[test]
fn gcq_is_more_specific_and_removes_fewer() {
    for preset in ["uni5", "uni10", "uni15", "uni20", "multi5", "multi10"] {
        let m = run(preset, 60, &[Method::Gcq, Method::Standard]);
        let (g, s) = (m.get(Method::Gcq).unwrap(), m.get(Method::Standard).unwrap());
        assert!(g.specificity >= s.specificity, "{preset}: {:?} vs {:?}", g.specificity, s.specificity);
        assert!(g.a_bar <= s.a_bar, "{preset}: {:?} vs {:?}", g.a_bar, s.a_bar);
        assert_eq!(g.failures + s.failures, 0);
    }
}

#[test]
fn full_model_bias_grows_with_outlier_share() {
    let bias: Vec<f64> = ["uni5", "uni10", "uni15", "uni20"]
        .iter()
        .map(|p| run(p, 60, &[Method::FullModel]).methods[0].mean_bias[0])
        .collect();
    assert!(bias.windows(2).all(|w| w[0] < w[1]), "{bias:?}");
}

#[test]
fn no_outliers_means_no_bias_and_few_flags() {
    let mut cfg = SimConfig::preset("uni10").unwrap();
    cfg.outlier_fraction = 0.0;
    cfg.n_runs = 60;
    let m = run_benchmark(&cfg, &[Method::FullModel, Method::Gcq, Method::Sanderson]).unwrap();
    assert!(m.get(Method::FullModel).unwrap().mean_bias[0].abs() < 0.02);
    for meth in [Method::Gcq, Method::Sanderson] {
        let spec = m.get(meth).unwrap().specificity.unwrap();
        assert!(spec >= 0.95, "{meth:?}: {spec}");
    }
}
