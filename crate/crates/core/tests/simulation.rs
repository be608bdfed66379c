mod common;

use std::f64::consts::PI;

use ifest_core::analytic::scaling::{median_at_range, RangeEstimator, RangeScale, ZoneRule};
use ifest_core::analytic::{mgf, AggregateDensity, PathlossParams, TierSpec, ZoneSolver, ZoneSpec};
use ifest_core::phy::Pathloss;
use ifest_core::rng::SeedKey;
use ifest_core::sim::*;
use ifest_core::stats;

const CHI: f64 = 5e-6;
const POWER: f64 = 40.0;
const LAMBDA_PL: f64 = 1e-3;

fn table_one(activity: f64) -> Deployment {
    let rho = mean_cell_radius(CHI);
    Deployment::new(
        vec![TierDeployment {
            deployed_density: CHI,
            activity,
            tx_power: POWER,
        }],
        Pathloss::PowerLaw {
            constant: LAMBDA_PL,
            exponent: 4.0,
        },
        rho * 35f64.sqrt(),
        rho * 3.5,
    )
    .unwrap()
}

fn mc_mean_se(values: &[f64]) -> (f64, f64) {
    let ci = stats::mean_ci(values);
    (ci.mean, ci.half_width / 1.96)
}

#[test]
fn station_counts_are_poisson() {
    let radius = (1e7 / PI).sqrt();
    let dep = Deployment::new(
        vec![TierDeployment {
            deployed_density: CHI,
            activity: 1.0,
            tx_power: POWER,
        }],
        Pathloss::PowerLaw {
            constant: LAMBDA_PL,
            exponent: 4.0,
        },
        radius,
        0.0,
    )
    .unwrap();
    let n = 4000;
    let mut counts = Vec::with_capacity(n);
    let mut radial = Vec::new();
    let mut angular = Vec::new();
    for d in 0..n {
        let drop = generate_drop(&dep, SeedKey::new(11).child(d as u64).value()).unwrap();
        counts.push(drop.len() as f64);
        if d < 200 {
            for s in drop.stations() {
                radial.push((s.position.norm() / radius).powi(2));
                angular.push(s.position.y.atan2(s.position.x));
            }
        }
    }
    let mean = stats::mean(&counts);
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    // Mean 50 with standard error sqrt(50/n); variance 50 with standard error ~ 50 sqrt(2/n).
    assert!(
        (mean - 50.0).abs() < 4.0 * (50.0 / n as f64).sqrt(),
        "mean {mean}"
    );
    assert!(
        (var - 50.0).abs() < 4.0 * 50.0 * (2.0 / n as f64).sqrt(),
        "var {var}"
    );

    // Chi-squared on count bins against the Poisson(50) law.
    let pmf = |k: u32| {
        (k as f64 * 50f64.ln() - 50.0 - (1..=k).map(|i| (i as f64).ln()).sum::<f64>()).exp()
    };
    let edges = [0u32, 38, 42, 45, 48, 50, 52, 55, 58, 62, 1000];
    let mut chi2 = 0.0;
    for w in edges.windows(2) {
        let p: f64 = (w[0]..w[1]).map(pmf).sum();
        let observed = counts
            .iter()
            .filter(|&&c| (c as u32) >= w[0] && (c as u32) < w[1])
            .count() as f64;
        let expected = p * n as f64;
        chi2 += (observed - expected).powi(2) / expected;
    }
    // 9 degrees of freedom; the 0.999 quantile is 27.88.
    assert!(chi2 < 27.88, "chi2 {chi2}");

    let crit = common::ks_critical(1e-3, radial.len() as f64);
    assert!(common::ks_statistic(&mut radial, |x| x.clamp(0.0, 1.0)) < crit);
    assert!(common::ks_statistic(&mut angular, |a| ((a + PI) / (2.0 * PI)).clamp(0.0, 1.0)) < crit);
}

#[test]
fn fading_is_unit_exponential() {
    let mut g = fading_gains(SeedKey::new(5), 100_000);
    let m = stats::mean(&g);
    assert!((m - 1.0).abs() < 4.0 / (g.len() as f64).sqrt());
    let d = common::ks_statistic(&mut g, |x| 1.0 - (-x).exp());
    assert!(d < common::ks_critical(0.01, 1e5), "ks {d}");
}

#[test]
fn activity_fraction_within_three_sigma() {
    let dep = table_one(0.3);
    let drop = generate_drop(&dep, 3).unwrap();
    let rrbs = 100;
    let mask = ActivityMask::draw(&drop, &dep, rrbs, SeedKey::new(4));
    let trials = (drop.len() * rrbs) as f64;
    let frac = mask.active_fraction(&drop, 0);
    assert!(
        (frac - 0.3).abs() < 3.0 * (0.3 * 0.7 / trials).sqrt(),
        "{frac} over {trials}"
    );
}

#[test]
fn interference_is_stationary_inside_inner_region() {
    let dep = table_one(1.0);
    let n = 4000;
    let sample = |point: Point, salt: u64| -> Vec<f64> {
        (0..n)
            .map(|d| {
                let key = SeedKey::new(salt).child(d as u64);
                let drop = generate_drop(&dep, key.value()).unwrap();
                let mask = ActivityMask::all_active(drop.len(), 1);
                aggregate_interference(
                    point,
                    &drop,
                    &dep,
                    &mask,
                    0,
                    None,
                    key.child(1),
                    &Truncation::None,
                )
                .unwrap()
            })
            .collect()
    };
    let inner = generate_drop(&dep, 0).unwrap().inner_radius();
    let mut centre = sample(Point::ORIGIN, 21);
    let mut edge = sample(Point::new(inner * 0.999, 0.0), 22);
    let d = common::ks_two_sample(&mut centre, &mut edge);
    // Two-sample critical value with effective size n/2.
    assert!(d < common::ks_critical(1e-3, n as f64 / 2.0), "ks {d}");
}

#[test]
fn frozen_mean_converges_to_conditional_mean() {
    let dep = table_one(0.5);
    let mut drop = generate_drop(&dep, 31).unwrap();
    let me = drop.insert_station(0, Point::ORIGIN);
    let plan = MeasurementPlan {
        n_samples: 100_000,
        range: 0.0,
        mode: SamplingMode::Frozen,
    };
    let samples = measurement_samples(me, &drop, &dep, &plan, SeedKey::new(32)).unwrap();
    let exact: f64 = drop
        .stations()
        .iter()
        .filter(|s| s.id != me)
        .map(|s| 0.5 * dep.mean_received_power(s, Point::ORIGIN))
        .sum();
    let (m, se) = mc_mean_se(&samples);
    assert!((m - exact).abs() < 3.0 * se, "{m} vs {exact} (se {se})");
    assert!(((m - exact) / exact).abs() < 0.05);
}

#[test]
fn shorter_measurement_is_prefix_of_longer() {
    let dep = table_one(0.5);
    let mut drop = generate_drop(&dep, 41).unwrap();
    let me = drop.insert_station(0, Point::ORIGIN);
    for mode in [SamplingMode::Frozen, SamplingMode::Ensemble] {
        let short = MeasurementPlan {
            n_samples: 50,
            range: 10.0,
            mode,
        };
        let long = MeasurementPlan {
            n_samples: 120,
            ..short
        };
        let a = measurement_samples(me, &drop, &dep, &short, SeedKey::new(42)).unwrap();
        let b = measurement_samples(me, &drop, &dep, &long, SeedKey::new(42)).unwrap();
        assert_eq!(a[..], b[..50]);
    }
}

#[test]
fn single_tier_mgf_matches_monte_carlo() {
    let dep = table_one(1.0);
    let rho = mean_cell_radius(CHI);
    let (r, big_r) = (0.5 * rho, 3.5 * rho);
    let drops = 100_000;
    let probe = RangeProbe {
        serving_tier: 0,
        serving_range: r,
        zone_radii: vec![big_r],
    };
    let samples = probe_interference(&dep, &probe, drops, SeedKey::new(51))
        .unwrap()
        .remove(0);
    let pl = PathlossParams::new(4.0, LAMBDA_PL).unwrap();
    let tier = TierSpec::new(CHI, POWER, &pl).unwrap();
    let scale = RangeScale::new(tier.beta(), 4.0).unwrap();
    for &level in &[1e-12, 1e-11, 1e-10] {
        let s = 1.0 / level;
        let zone = ZoneSpec::new(scale.normalize(r, level), scale.normalize(big_r, level)).unwrap();
        let want = mgf(s, zone, &[tier], 4.0).unwrap();
        let values: Vec<f64> = samples.iter().map(|i| (-s * i).exp()).collect();
        let (got, se) = mc_mean_se(&values);
        assert!(
            (got - want).abs() < 4.0 * se + 1e-4,
            "level {level}: {got} vs {want} (se {se})"
        );
    }
}

#[test]
fn two_tier_mgf_matches_monte_carlo() {
    // Unit pathloss constant; tier 2 transmits at a quarter of tier 1.
    let dep = Deployment::new(
        vec![
            TierDeployment {
                deployed_density: 0.5,
                activity: 1.0,
                tx_power: 1.0,
            },
            TierDeployment {
                deployed_density: 1.0,
                activity: 1.0,
                tx_power: 0.25,
            },
        ],
        Pathloss::PowerLaw {
            constant: 1.0,
            exponent: 4.0,
        },
        3.0,
        2.0,
    )
    .unwrap();
    // At s = 1 the normalized zone (0.5, 2) is the physical zone (sqrt 0.5, sqrt 2) for tier 1.
    let probe = RangeProbe {
        serving_tier: 0,
        serving_range: 0.5f64.sqrt(),
        zone_radii: vec![2f64.sqrt()],
    };
    let samples = probe_interference(&dep, &probe, 400_000, SeedKey::new(52))
        .unwrap()
        .remove(0);
    let pl = PathlossParams::new(4.0, 1.0).unwrap();
    let tiers = [
        TierSpec::new(0.5, 1.0, &pl).unwrap(),
        TierSpec::new(1.0, 0.25, &pl).unwrap(),
    ];
    let want = mgf(1.0, ZoneSpec::new(0.5, 2.0).unwrap(), &tiers, 4.0).unwrap();
    // Hand form: exp(-pi Q (0.5 * 1 + 1.0 * sqrt(1/4))) = exp(-pi Q).
    assert!((want - (-PI * 0.75f64.atan()).exp()).abs() < 1e-14);
    let values: Vec<f64> = samples.iter().map(|i| (-i).exp()).collect();
    let (got, se) = mc_mean_se(&values);
    assert!((got - want).abs() < 4.0 * se, "{got} vs {want} (se {se})");
}

#[test]
fn solved_zone_median_matches_simulation() {
    let dep = table_one(1.0);
    let rho = mean_cell_radius(CHI);
    let pl = PathlossParams::new(4.0, LAMBDA_PL).unwrap();
    let tier = TierSpec::new(CHI, POWER, &pl).unwrap();
    let agg = AggregateDensity::from_tiers(&[tier]);
    let scale = RangeScale::new(tier.beta(), 4.0).unwrap();
    for (i, &frac) in [0.3, 0.5, 0.7].iter().enumerate() {
        let r = frac * rho;
        let analytic =
            median_at_range(r, agg, tier.beta(), ZoneRule::Solved(ZoneSolver::default())).unwrap();
        let probe = RangeProbe {
            serving_tier: 0,
            serving_range: r,
            zone_radii: vec![analytic.zone_radius_physical(&scale)],
        };
        let mut samples = probe_interference(&dep, &probe, 100_000, SeedKey::new(60 + i as u64))
            .unwrap()
            .remove(0);
        let sim = stats::median(&mut samples);
        assert!(
            ((sim - analytic.power) / analytic.power).abs() < 0.05,
            "r={frac} rho: {sim} vs {}",
            analytic.power
        );
    }
}

#[test]
fn estimate_at_cell_interior_within_ten_percent() {
    let dep = table_one(1.0);
    let rho = mean_cell_radius(CHI);
    let beta = 1.0 / (POWER * LAMBDA_PL);
    let plan = MeasurementPlan {
        n_samples: 5000,
        range: 10.0,
        mode: SamplingMode::Ensemble,
    };
    let estimates: Vec<f64> = (0..20)
        .map(|d| {
            let key = SeedKey::new(70).child(d);
            let mut drop = generate_drop(&dep, key.value()).unwrap();
            let me = drop.insert_station(0, Point::ORIGIN);
            let m = measure_at_base(me, &drop, &dep, &plan, key.child(1)).unwrap();
            RangeEstimator::new(m.median_power, m.range, beta, ZoneSolver::default())
                .unwrap()
                .interference_at(0.8 * rho)
                .unwrap()
                .power
        })
        .collect();
    let probe = RangeProbe {
        serving_tier: 0,
        serving_range: 0.8 * rho,
        zone_radii: vec![f64::INFINITY],
    };
    let mut sim = probe_interference(&dep, &probe, 20_000, SeedKey::new(71))
        .unwrap()
        .remove(0);
    let truth = stats::median(&mut sim);
    let est = stats::mean(&estimates);
    assert!(((est - truth) / truth).abs() < 0.10, "{est} vs {truth}");
}

#[test]
fn inferred_density_within_six_percent() {
    let plan = DensityValidationPlan {
        deployed_densities: vec![CHI],
        activity: 1.0,
        tx_power: POWER,
        pathloss_constant: LAMBDA_PL,
        expected_cells: 35.0,
        guard_cells: 3.5,
        measurement_range: 10.0,
        sample_counts: vec![5000],
        drops: 40,
        mode: SamplingMode::Ensemble,
        solver: ZoneSolver::default(),
    };
    let rows = run_density_validation(&plan, SeedKey::new(80)).unwrap();
    let row = rows[0];
    assert!(
        ((row.inferred_mean - row.active_density) / row.active_density).abs() < 0.06,
        "{row:?}"
    );
}
