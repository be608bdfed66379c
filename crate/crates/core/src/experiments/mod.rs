//! Configuration, experiment runners and result tables.

mod config;
mod table;

pub use config::{
    ExperimentConfig, GeometrySection, NetworkSection, PhySection, SamplingSection, SweepSection,
    TierSection, ZoneSection,
};
pub use table::{verify_csv, Provenance, ResultTable, VerifiedTable, CODE_VERSION};

use crate::analytic::scaling::{median_at_range, RangeScale, ZoneRule};
use crate::analytic::AggregateDensity;
use crate::avoidance::{run_throughput_sweep, ThroughputPlan};
use crate::error::{Error, Result};
use crate::rng::SeedKey;
use crate::sim::{probe_interference, run_density_validation, DensityValidationPlan, RangeProbe};
use crate::stats;

const PER_KM2: f64 = 1e-6;

/// Analytic sum of `lambda_k / sqrt(beta_k)` over the configured tiers.
pub fn configured_aggregate(config: &ExperimentConfig) -> Result<AggregateDensity> {
    AggregateDensity::new(
        config
            .network
            .tiers
            .iter()
            .enumerate()
            .map(|(k, t)| t.deployed_density_per_km2 * PER_KM2 * t.activity / config.beta(k).sqrt())
            .sum(),
    )
}

fn require_alpha4(config: &ExperimentConfig) -> Result<()> {
    if config.network.pathloss_exponent != 4.0 {
        return Err(Error::Config(
            "closed-form medians exist only for network.pathloss_exponent = 4".into(),
        ));
    }
    Ok(())
}

/// Median interference against zone radius for several user ranges, with the
/// Monte Carlo median on the same truncation. One extra row per range gives
/// the solved zone (`solved = 1`).
pub fn run_zone_sweep(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    require_alpha4(config)?;
    let deployment = config.deployment()?;
    let rho = config.mean_cell_radius();
    let beta = config.beta(0);
    let agg = configured_aggregate(config)?;
    let scale = RangeScale::new(beta, 4.0)?;
    let solver = config.solver()?;
    let key = SeedKey::new(config.seed);
    let mut table = ResultTable::new(
        &config.experiment,
        &[
            "serving_range_cells",
            "serving_range_m",
            "zone_radius_cells",
            "zone_radius_m",
            "solved",
            "normalized_zone_radius",
            "analytic_median_w",
            "simulated_median_w",
            "simulated_to_analytic",
            "drops",
        ],
        Provenance::new("zone-sweep", config),
    );
    for (i, &r_cells) in config.sweep.serving_range_cells.iter().enumerate() {
        let r = r_cells * rho;
        let mut entries: Vec<(f64, bool, f64, f64)> = Vec::new();
        for &big_cells in &config.sweep.zone_radius_cells {
            if big_cells < r_cells {
                continue;
            }
            let m = median_at_range(r, agg, beta, ZoneRule::Radius(big_cells * rho))?;
            entries.push((big_cells * rho, false, m.zone.zone_radius(), m.power));
        }
        let solved = median_at_range(r, agg, beta, ZoneRule::Solved(solver))?;
        entries.push((
            solved.zone_radius_physical(&scale),
            true,
            solved.zone.zone_radius(),
            solved.power,
        ));
        let probe = RangeProbe {
            serving_tier: 0,
            serving_range: r,
            zone_radii: entries.iter().map(|e| e.0).collect(),
        };
        let samples = probe_interference(
            &deployment,
            &probe,
            config.sampling.n_drops,
            key.child(i as u64),
        )?;
        for (entry, mut column) in entries.into_iter().zip(samples) {
            let (big_r, is_solved, normalized, analytic) = entry;
            let simulated = stats::median(&mut column);
            table.push(vec![
                r_cells,
                r,
                big_r / rho,
                big_r,
                f64::from(u8::from(is_solved)),
                normalized,
                analytic,
                simulated,
                simulated / analytic,
                config.sampling.n_drops as f64,
            ]);
        }
    }
    Ok(table)
}

/// Density inference accuracy over the configured deployed densities.
pub fn run_density_validation_cmd(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    require_alpha4(config)?;
    let tier = &config.network.tiers[0];
    let plan = DensityValidationPlan {
        deployed_densities: config
            .sweep
            .deployed_density_per_km2
            .iter()
            .map(|c| c * PER_KM2)
            .collect(),
        activity: tier.activity,
        tx_power: tier.tx_power_w,
        pathloss_constant: config.network.pathloss_constant,
        expected_cells: config.geometry.expected_cells,
        guard_cells: config.geometry.guard_ring_cells,
        measurement_range: config.geometry.measurement_range_m,
        sample_counts: config.sweep.sample_counts.clone(),
        drops: config.sampling.n_drops,
        mode: config.sampling.mode,
        solver: config.solver()?,
    };
    let rows = run_density_validation(&plan, SeedKey::new(config.seed))?;
    let mut table = ResultTable::new(
        &config.experiment,
        &[
            "deployed_density_per_km2",
            "activity",
            "active_density_per_km2",
            "inferred_density_per_km2",
            "accuracy",
            "accuracy_ci95",
            "n_samples",
            "drops",
        ],
        Provenance::new("validate-density", config),
    );
    for r in rows {
        table.push(vec![
            r.deployed_density / PER_KM2,
            tier.activity,
            r.active_density / PER_KM2,
            r.inferred_mean / PER_KM2,
            r.accuracy,
            r.accuracy_ci,
            r.n_samples as f64,
            r.drops as f64,
        ]);
    }
    Ok(table)
}

/// Cell throughput of both schemes against neighbour activity.
pub fn run_throughput_sweep_cmd(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    require_alpha4(config)?;
    if config.network.tiers.len() != 1 {
        return Err(Error::Config(
            "throughput-sweep needs exactly one tier".into(),
        ));
    }
    let rho = config.mean_cell_radius();
    let plan = ThroughputPlan {
        deployment: config.deployment()?,
        activities: config.sweep.activity.clone(),
        drops: config.sampling.n_drops,
        mean_ues: config.phy.ues_per_cell,
        ue_search_radius: config.geometry.ue_search_cells * rho,
        grid: config.grid()?,
        table: config.mcs_table()?,
        policy: config.policy()?,
        measurement: config.measurement(),
    };
    let rows = run_throughput_sweep(&plan, SeedKey::new(config.seed))?;
    let mut table = ResultTable::new(
        &config.experiment,
        &[
            "activity",
            "active_density_per_km2",
            "hfr1_mbps",
            "hfr1_ci95_mbps",
            "proposed_mbps",
            "proposed_ci95_mbps",
            "ratio",
            "difference_ci95_mbps",
            "muted_fraction",
            "hfr1_served_above_threshold",
            "proposed_served_above_threshold",
            "drops",
        ],
        Provenance::new("throughput-sweep", config),
    );
    for r in rows {
        table.push(vec![
            r.activity,
            r.active_density / PER_KM2,
            r.hfr1.mean / 1e6,
            r.hfr1.half_width / 1e6,
            r.proposed.mean / 1e6,
            r.proposed.half_width / 1e6,
            r.ratio,
            r.difference_ci / 1e6,
            r.muted_fraction,
            r.hfr1_served_ok,
            r.proposed_served_ok,
            config.sampling.n_drops as f64,
        ]);
    }
    Ok(table)
}
