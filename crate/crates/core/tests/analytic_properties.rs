mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use ifest_core::analytic::*;
use ifest_core::special::{erfc, erfc_inv_half};
use proptest::prelude::*;

fn zone(r: f64, big_r: f64) -> ZoneSpec {
    ZoneSpec::new(r, big_r).unwrap()
}

fn agg(lambda: f64, beta: f64) -> AggregateDensity {
    AggregateDensity::homogeneous(lambda, beta).unwrap()
}

#[test]
fn erfc_agrees_with_statrs() {
    let mut x = -6.0;
    while x <= 26.0 {
        let got = erfc(x);
        let want = common::erfc_ref(x);
        // statrs carries errors up to ~1e-11 here; the tight check is the mpmath table in the unit tests.
        assert!((got - want).abs() <= 5e-11, "x={x}: {got} vs {want}");
        if want > 1e-300 {
            assert!(((got - want) / want).abs() < 1e-9, "x={x}: {got} vs {want}");
        }
        x += 0.01;
    }
}

#[test]
fn q_factor_alpha4_matches_quadrature_oracle() {
    let oracle = common::simpson(&|u: f64| 1.0 / (1.0 + u * u), 0.5, 2.0, 1e-14);
    let q = q_factor(zone(0.5, 2.0), 4.0).unwrap();
    assert!((q - oracle).abs() < 1e-12);
    assert!((q - 0.6435).abs() < 1e-4);
}

#[test]
fn q_factor_alpha3_matches_closed_form() {
    for &(r, big_r) in &[
        (0.5, 2.0),
        (0.0, 1.0),
        (0.1, 30.0),
        (3.0, 3.5),
        (0.2, 1e6),
        (5.0, 1e9),
    ] {
        let got = q_factor(zone(r, big_r), 3.0).unwrap();
        let want = common::q_factor_alpha3(r, big_r);
        let quad = common::simpson(&|u: f64| 1.0 / (1.0 + u.powf(1.5)), r, big_r, 1e-14);
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "({r},{big_r}): {got} vs {want}"
        );
        assert!(((quad - want) / want).abs() < 1e-10);
    }
    let inf = q_factor(ZoneSpec::unbounded(0.0).unwrap(), 3.0).unwrap();
    // int_0^inf du/(1+u^a) = (pi/a) / sin(pi/a) with a = 1.5.
    let want = (PI / 1.5) / (PI / 1.5).sin();
    assert!((inf - want).abs() < 1e-12, "{inf} vs {want}");
    let inf5 = q_factor(ZoneSpec::unbounded(0.0).unwrap(), 5.0).unwrap();
    let want5 = (PI / 2.5) / (PI / 2.5).sin();
    assert!((inf5 - want5).abs() < 1e-12, "{inf5} vs {want5}");
}

#[test]
fn truncated_mean_matches_quadrature() {
    // Q = 0.6435 = atan(0.75) for every R by choosing r.
    let a = agg(1.0, 1.0);
    for &big_r in &[1.0, 10.0, 100.0] {
        let r = (big_r - 0.75) / (1.0 + 0.75 * big_r);
        let z = zone(r, big_r);
        assert!((q_factor_alpha4(z) - 0.75f64.atan()).abs() < 1e-14);
        let closed = mean_interference_truncated(z, a).unwrap();
        let q = q_factor_alpha4(z);
        let quad = common::integrate_positive(|w| w * common::levy_pdf(w, q, 1.0), big_r, 1e-15);
        assert!(
            ((closed - quad) / quad).abs() < 1e-8,
            "R={big_r}: {closed} vs {quad}"
        );
    }
}

#[test]
fn solver_example_matches_dense_scan() {
    let solver = ZoneSolver::default();
    let got = solver.radius(0.2).unwrap();
    // Last grid point, scanning down from the cap, where the gradient exceeds phi.
    let step = 1e-4;
    let mut x = 100.0;
    while ZoneSolver::shape_gradient(0.2, x) <= 0.01 {
        x -= step;
    }
    assert!((got - x).abs() <= step, "{got} vs scan {x}");
    // The analytic gradient is the derivative of the median divided by C^2.
    let a = agg(1.0, 1.0);
    let c2 = (PI / (2.0 * erfc_inv_half())).powi(2);
    let h = 1e-6;
    let fd = (median_interference(zone(0.2, got + h), a)
        - median_interference(zone(0.2, got - h), a))
        / (2.0 * h);
    assert!((fd / c2 - ZoneSolver::shape_gradient(0.2, got)).abs() < 1e-8);
    assert!((median_gradient(zone(0.2, got), a) / c2 - 0.01).abs() < 1e-9);
}

#[test]
fn reduction_to_one_tier_is_exact() {
    let pl = PathlossParams::new(4.0, 1e-3).unwrap();
    let tier = TierSpec::new(3e-6, 40.0, &pl).unwrap();
    let from_tiers = AggregateDensity::from_tiers(&[tier]);
    let scalar = agg(3e-6, tier.beta());
    assert!(((from_tiers.value() - scalar.value()) / scalar.value()).abs() < 1e-15);
    let z = zone(0.3, 12.0);
    let m1 = median_interference(z, from_tiers);
    let m2 = median_interference(z, scalar);
    assert!(((m1 - m2) / m2).abs() < 1e-12);
    let s = 1.0 / m1;
    let direct = (-PI * 3e-6 * (s / tier.beta()).sqrt() * q_factor_alpha4(z)).exp();
    assert!(((mgf(s, z, &[tier], 4.0).unwrap() - direct) / direct).abs() < 1e-12);
}

#[test]
fn full_plane_median_example() {
    let m = median_interference(ZoneSpec::unbounded(0.0).unwrap(), agg(1.0, 1.0));
    let want = (PI * FRAC_PI_2 / (2.0 * 0.476_936_276_204_469_9)).powi(2);
    assert!(((m - want) / want).abs() < 1e-14);
}

fn zone_strategy() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..3.0, 0.05f64..40.0).prop_map(|(r, w)| (r, r + w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pdf_integrates_to_one(lambda in 0.05f64..5.0, beta in 0.1f64..10.0, (r, big_r) in zone_strategy()) {
        let z = zone(r, big_r);
        let a = agg(lambda, beta);
        let total = common::integrate_positive(|i| interference_pdf(i, z, a).unwrap(), f64::INFINITY, 1e-14);
        prop_assert!((total - 1.0).abs() < 1e-6, "total {}", total);
    }

    #[test]
    fn mgf_is_laplace_transform_of_pdf(lambda in 0.05f64..3.0, (r, big_r) in zone_strategy()) {
        let z = zone(r, big_r);
        let pl = PathlossParams::new(4.0, 1.0).unwrap();
        let tier = TierSpec::new(lambda, 1.0, &pl).unwrap();
        let a = AggregateDensity::from_tiers(&[tier]);
        for &s in &[0.1, 1.0, 10.0] {
            let lt = common::integrate_positive(|i| (-s * i).exp() * interference_pdf(i, z, a).unwrap(), f64::INFINITY, 1e-15);
            let m = mgf(s, z, &[tier], 4.0).unwrap();
            prop_assert!((lt - m).abs() < 1e-6, "s={} {} vs {}", s, lt, m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cdf_derivative_is_pdf(lambda in 0.05f64..5.0, beta in 0.1f64..10.0, (r, big_r) in zone_strategy(), p in 0.02f64..0.98) {
        let z = zone(r, big_r);
        let a = agg(lambda, beta);
        // Evaluate at the p-quantile so the point sits inside the bulk.
        let x = PI * q_factor_alpha4(z) * a.value() / (2.0 * ifest_core::special::erfc_inv(p));
        let i = x * x;
        let h = i * 1e-5;
        let fd = (interference_cdf(i + h, z, a).unwrap() - interference_cdf(i - h, z, a).unwrap()) / (2.0 * h);
        let pdf = interference_pdf(i, z, a).unwrap();
        prop_assert!(((fd - pdf) / pdf).abs() < 1e-5, "{} vs {}", fd, pdf);
    }

    #[test]
    fn cdf_at_median_is_one_half(lambda in 1e-3f64..1e3, beta in 1e-3f64..1e3, (r, big_r) in zone_strategy()) {
        let z = zone(r, big_r);
        let a = agg(lambda, beta);
        let m = median_interference(z, a);
        prop_assert!((interference_cdf(m, z, a).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn median_monotonicity(lambda in 0.01f64..10.0, beta in 0.1f64..10.0, r in 0.0f64..3.0, w in 0.01f64..20.0) {
        let z = zone(r, r + w);
        let wider = zone(r, r + 1.5 * w);
        let inner = zone(r + 0.5 * w, r + w);
        let m = median_interference(z, agg(lambda, beta));
        prop_assert!(median_interference(wider, agg(lambda, beta)) > m);
        prop_assert!(median_interference(inner, agg(lambda, beta)) < m);
        prop_assert!(median_interference(z, agg(1.1 * lambda, beta)) > m);
        prop_assert!(median_interference(z, agg(lambda, 1.1 * beta)) < m);
        prop_assert!(q_factor_alpha4(wider) > q_factor_alpha4(z));
    }

    #[test]
    fn inference_inverts_median(lambda in 1e-8f64..1e-3, beta in 1e-2f64..1e3, (r, big_r) in zone_strategy()) {
        let z = zone(r, big_r);
        let m = median_interference(z, agg(lambda, beta));
        let back = infer_density(m, z, beta).unwrap();
        prop_assert!(((back - lambda) / lambda).abs() < 1e-12);
    }

    #[test]
    fn estimate_chains_two_medians(lambda in 0.01f64..10.0, (r, big_r) in zone_strategy(), (d, big_d) in zone_strategy()) {
        let a = agg(lambda, 1.0);
        let zr = zone(r, big_r);
        let zd = zone(d, big_d);
        let via = estimate_interference_at(median_interference(zd, a), zd, zr).unwrap();
        let direct = median_interference(zr, a);
        prop_assert!(((via - direct) / direct).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone(lambda in 0.01f64..10.0, (r, big_r) in zone_strategy(), x in 1e-6f64..1e6, y in 1e-6f64..1e6) {
        let z = zone(r, big_r);
        let a = agg(lambda, 1.0);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(interference_cdf(lo, z, a).unwrap() <= interference_cdf(hi, z, a).unwrap());
    }
}
