mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use convexity::error::Error;
use convexity::field::{builtin, BuiltinParams, QuadraticForm, ScalarField};
use convexity::hessian::FdConfig;
use convexity::quadrature::{global_convexity_index, region_map, simpson_weights, sweep_conv_a, HyperRect};
use proptest::prelude::*;

fn h_cos() -> ScalarField {
    builtin("h_cos", &BuiltinParams::default()).unwrap()
}

fn square(a: f64) -> HyperRect {
    HyperRect::cube(2, -a, a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn global_index_in_unit_interval(seed in any::<u64>(), lo in -3.0..0.0f64, width in 0.1..3.0f64) {
        let mut rng = common::rng(seed);
        let a = common::random_symmetric(&mut rng, 2, 2.0);
        let f = ScalarField::quadratic(QuadraticForm { a, b: vec![0.0; 2], c: 0.0 }).unwrap();
        let g = global_convexity_index(&f, &HyperRect::cube(2, lo, lo + width).unwrap(), 11, &FdConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&g.value));
    }

    #[test]
    fn simpson_weights_sum_to_length(k in 1usize..200, lo in -5.0..5.0f64, len in 0.01..10.0f64) {
        let w = simpson_weights(2 * k + 1, lo, lo + len).unwrap();
        prop_assert!((w.iter().sum::<f64>() - len).abs() <= 1e-12 * len);
    }
}

#[test]
fn refinement_is_stable() {
    let cfg = FdConfig::default();
    let coarse = global_convexity_index(&h_cos(), &square(2.0), 101, &cfg).unwrap().value;
    let fine = global_convexity_index(&h_cos(), &square(2.0), 201, &cfg).unwrap().value;
    assert!((coarse - fine).abs() <= 1e-3, "{coarse} vs {fine}");
}

#[test]
fn tracks_one_dimensional_reduction() {
    let cfg = FdConfig::default();
    for a in [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 2.0 * PI] {
        let g = global_convexity_index(&h_cos(), &square(a), 201, &cfg).unwrap().value;
        let want = common::h_cos_conv(a);
        assert!((g - want).abs() <= 2e-3, "a = {a}: {g} vs {want}");
    }
}

#[test]
fn convex_everywhere_gives_exactly_one() {
    let f = ScalarField::parse("x^2 + x*y + y^2 + exp(x)", 2).unwrap();
    let g = global_convexity_index(
        &f,
        &HyperRect::new(vec![-1.0, 0.0], vec![2.0, 1.0]).unwrap(),
        51,
        &FdConfig::default(),
    )
    .unwrap();
    assert_eq!(g.value, 1.0);
    assert!(!g.degenerate);
}

#[test]
fn h_cos_sweep_in_convex_regime() {
    let s = sweep_conv_a(&h_cos(), &[0.0, 0.0], FRAC_PI_2, 4, 201, &FdConfig::default()).unwrap();
    assert_eq!(s.records.len(), 4);
    for r in &s.records {
        assert!((r.conv - 1.0).abs() <= 1e-9, "{r:?}");
    }
}

#[test]
fn three_dimensional_box() {
    let f = ScalarField::parse("x^2 + y^2 - z^2", 3).unwrap();
    let g = global_convexity_index(&f, &HyperRect::cube(3, -1.0, 1.0).unwrap(), 7, &FdConfig::default()).unwrap();
    assert!((g.value - 2.0 / 3.0).abs() <= 1e-6);
}

#[test]
fn map_examples() {
    let cfg = FdConfig::default();
    let m = region_map(&h_cos(), &HyperRect::cube(2, -4.0, 4.0).unwrap(), 9, &cfg).unwrap();
    let at = |x: f64, y: f64| m.reports.iter().find(|r| r.point == vec![x, y]).unwrap();
    assert_eq!(at(0.0, 0.0).conv, 1.0);
    assert!(at(3.0, 3.0).conv < 0.5);

    let region = HyperRect::new(vec![-2.0, 0.5], vec![1.0, 3.0]).unwrap();
    let up = region_map(&ScalarField::parse("x^2 + y^2", 2).unwrap(), &region, 7, &cfg).unwrap();
    assert!(up.reports.iter().all(|r| r.conv == 1.0));
    let down = region_map(&ScalarField::parse("-x^2 - y^2", 2).unwrap(), &region, 7, &cfg).unwrap();
    assert!(down.reports.iter().all(|r| r.conv == 0.0));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| global_convexity_index(&h_cos(), &square(2.5), 101, &FdConfig::default()).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.value.to_bits(), four.value.to_bits());
    assert_eq!(one, four);
}

#[test]
fn region_outside_domain_is_rejected() {
    let f = builtin(
        "h_beta",
        &BuiltinParams {
            beta: Some(2.0),
            ..Default::default()
        },
    )
    .unwrap();
    let err = global_convexity_index(&f, &HyperRect::cube(2, 0.0, 0.5).unwrap(), 5, &FdConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Domain { .. }), "{err:?}");
    assert!(global_convexity_index(&h_cos(), &square(1.0), 4, &FdConfig::default()).is_err());
}
