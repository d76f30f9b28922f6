mod common;

use std::f64::consts::FRAC_PI_2;

use common::{ks_p_value, ks_statistic, marginal, pg_density, tanh_sinh};
use pgcopula::{pg_cdf, pg_log_pdf, pg_quantile, pg_sample, Angle, MarginalParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn density_matches_definition() {
    for &(a1, a2, b) in &[(2.0, 3.0, 1.5), (0.5, 0.5, 1.0), (7.0, 1.2, 0.3)] {
        let p = marginal(a1, a2, b);
        for k in 1..20 {
            let t = k as f64 * FRAC_PI_2 / 20.0;
            let got = pg_log_pdf(t, &p).unwrap().exp();
            let want = pg_density(t, a1, a2, b);
            assert!((got / want - 1.0).abs() < 1e-12, "({a1},{a2},{b}) at {t}");
        }
    }
}

#[test]
fn uniform_special_case() {
    // α1 = α2 = β = 1 gives f(θ) = 1 / (cos θ + sin θ)².
    let p = marginal(1.0, 1.0, 1.0);
    for t in [0.1f64, 0.7, 1.3] {
        let want = -2.0 * (t.cos() + t.sin()).ln();
        assert!((pg_log_pdf(t, &p).unwrap() - want).abs() < 1e-14);
    }
}

#[test]
fn normalizes_for_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = marginal(
            rng.random_range(0.75..8.0),
            rng.random_range(0.75..8.0),
            rng.random_range(0.25..4.0),
        );
        let mass = tanh_sinh(|t| pg_log_pdf(t, &p).unwrap().exp(), 0.0, FRAC_PI_2, 1e-13);
        assert!((mass - 1.0).abs() < 1e-8, "{p:?}: mass {mass}");
    }
}

#[test]
fn cdf_matches_quadrature_on_grid() {
    let params = [
        (2.0, 3.0, 1.5),
        (0.5, 0.5, 1.0),
        (0.7, 3.0, 0.4),
        (1.0, 1.0, 1.0),
        (5.0, 2.0, 3.0),
        (0.3, 4.0, 2.0),
        (12.0, 9.0, 0.8),
        (1.5, 0.6, 6.0),
        (3.0, 3.0, 0.1),
        (0.9, 1.1, 10.0),
    ];
    let mut worst = 0.0f64;
    for &(a1, a2, b) in &params {
        let p = marginal(a1, a2, b);
        for k in 0..50 {
            let t = (k as f64 + 0.5) / 50.0 * FRAC_PI_2;
            let q = tanh_sinh(|s| pg_density(s, a1, a2, b), 0.0, t, 1e-14);
            worst = worst.max((pg_cdf(t, &p).unwrap() - q).abs());
        }
    }
    assert!(worst < 1e-8, "max deviation {worst}");
}

#[test]
fn frozen_cdf_values() {
    let table = [
        (0.3, 2.0, 3.0, 1.5, 0.097_078_115_840_538_361_905),
        (0.8, 2.0, 3.0, 1.5, 0.487_311_005_903_405_438_6),
        (1.2, 2.0, 3.0, 1.5, 0.810_171_011_905_548_444_62),
        (0.2, 0.5, 0.5, 1.0, 0.269_320_678_105_644_736_68),
        (1.5, 0.7, 3.0, 0.4, 0.462_175_196_575_107_929_99),
    ];
    for (t, a1, a2, b, want) in table {
        let got = pg_cdf(t, &marginal(a1, a2, b)).unwrap();
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
}

#[test]
fn boundary_behaviour() {
    let p = marginal(2.0, 3.0, 1.5);
    assert_eq!(pg_cdf(0.0, &p).unwrap(), 0.0);
    assert_eq!(pg_cdf(FRAC_PI_2, &p).unwrap(), 1.0);
    assert!(pg_cdf(-0.1, &p).is_err());
    assert!(pg_log_pdf(0.0, &p).is_err());
    assert!(pg_log_pdf(FRAC_PI_2, &p).is_err());
    assert!(pg_quantile(0.0, &p).is_err());
    assert!(pg_quantile(1.0, &p).is_err());
    assert!(Angle::new(FRAC_PI_2).is_err());
    assert!(MarginalParams::new(0.0, 1.0, 1.0).is_err());
    assert!(MarginalParams::new(1.0, 1.0, f64::INFINITY).is_err());
}

#[test]
fn samples_pass_ks() {
    let triples = [
        (2.0, 2.0, 1.0),
        (0.5, 0.5, 1.0),
        (2.0, 3.0, 1.5),
        (0.3, 0.3, 0.5),
        (5.0, 1.0, 2.0),
        (1.0, 1.0, 1.0),
        (10.0, 10.0, 1.0),
        (0.7, 4.0, 0.2),
        (3.0, 0.6, 5.0),
        (1.5, 2.5, 8.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &(a1, a2, b) in &triples {
        let p = marginal(a1, a2, b);
        let xs: Vec<f64> = (0..10_000).map(|_| pg_sample(&p, &mut rng).value()).collect();
        let d = ks_statistic(&xs, |t| pg_cdf(t, &p).unwrap());
        let pv = ks_p_value(xs.len(), d);
        assert!(pv > 0.01, "({a1},{a2},{b}): D = {d}, p = {pv}");
    }
}

proptest! {
    #[test]
    fn quantile_inverts_cdf(p in 1e-9f64..1.0, a1 in 0.2f64..20.0, a2 in 0.2f64..20.0, b in 0.05f64..20.0) {
        prop_assume!(p < 1.0 - 1e-9);
        let m = marginal(a1, a2, b);
        let t = pg_quantile(p, &m).unwrap().value();
        prop_assert!(t > 0.0 && t < FRAC_PI_2);
        let back = pg_cdf(t, &m).unwrap();
        prop_assert!((back - p).abs() < 1e-9 * (1.0 + 1.0 / p.min(1.0 - p)).min(1e3), "p {} back {}", p, back);
    }

    #[test]
    fn cdf_monotone(t1 in 1e-6f64..FRAC_PI_2, t2 in 1e-6f64..FRAC_PI_2, a1 in 0.2f64..20.0, a2 in 0.2f64..20.0, b in 0.05f64..20.0) {
        let m = marginal(a1, a2, b);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(pg_cdf(lo, &m).unwrap() <= pg_cdf(hi, &m).unwrap());
    }

    #[test]
    fn reflection_symmetry(t in 0.01f64..1.56, a1 in 0.2f64..20.0, a2 in 0.2f64..20.0, b in 0.05f64..20.0) {
        // θ ↦ π/2 - θ swaps the shapes and inverts β.
        let lhs = pg_log_pdf(t, &marginal(a1, a2, b)).unwrap();
        let rhs = pg_log_pdf(FRAC_PI_2 - t, &marginal(a2, a1, 1.0 / b)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}
