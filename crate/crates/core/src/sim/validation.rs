use rayon::prelude::*;

use super::{
    generate_drop, measure_at_base, Deployment, MeasurementPlan, Point, SamplingMode,
    TierDeployment,
};
use crate::analytic::{scaling::RangeEstimator, ZoneSolver};
use crate::error::{invalid, Result};
use crate::phy::Pathloss;
use crate::rng::{tag, SeedKey};
use crate::stats;

/// Density-inference validation over a sweep of deployed densities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityValidationPlan {
    /// Deployed densities to sweep, per square metre.
    pub deployed_densities: Vec<f64>,
    pub activity: f64,
    pub tx_power: f64,
    pub pathloss_constant: f64,
    /// Expected number of stations in the drop disc.
    pub expected_cells: f64,
    /// Guard ring width in mean cell radii.
    pub guard_cells: f64,
    pub measurement_range: f64,
    pub sample_counts: Vec<usize>,
    pub drops: usize,
    pub mode: SamplingMode,
    pub solver: ZoneSolver,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValidationRow {
    pub deployed_density: f64,
    pub active_density: f64,
    pub inferred_mean: f64,
    pub accuracy: f64,
    pub accuracy_ci: f64,
    pub n_samples: usize,
    pub drops: usize,
}

/// Mean cell radius `1/sqrt(pi chi)`.
pub fn mean_cell_radius(deployed_density: f64) -> f64 {
    1.0 / (std::f64::consts::PI * deployed_density).sqrt()
}

/// Measures at a station placed at the centre of each drop and infers the
/// active density from the median of its samples.
pub fn run_density_validation(
    plan: &DensityValidationPlan,
    key: SeedKey,
) -> Result<Vec<DensityValidationRow>> {
    if plan.drops == 0 {
        return Err(invalid("drops", "must be at least 1"));
    }
    let beta = 1.0 / (plan.tx_power * plan.pathloss_constant);
    let mut rows = Vec::new();
    for (ci, &chi) in plan.deployed_densities.iter().enumerate() {
        if chi.is_nan() || chi <= 0.0 {
            return Err(invalid("deployed density", "must be positive"));
        }
        let rho = mean_cell_radius(chi);
        let deployment = Deployment::new(
            vec![TierDeployment {
                deployed_density: chi,
                activity: plan.activity,
                tx_power: plan.tx_power,
            }],
            Pathloss::PowerLaw {
                constant: plan.pathloss_constant,
                exponent: 4.0,
            },
            rho * plan.expected_cells.sqrt(),
            rho * plan.guard_cells,
        )?;
        let lambda = chi * plan.activity;
        for &n in &plan.sample_counts {
            let mplan = MeasurementPlan {
                n_samples: n,
                range: plan.measurement_range,
                mode: plan.mode,
            };
            let inferred: Vec<f64> = (0..plan.drops)
                .into_par_iter()
                .map(|d| {
                    let dk = key.child(ci as u64).child(d as u64);
                    let mut drop = generate_drop(&deployment, dk.child(tag::DEPLOYMENT).value())?;
                    let me = drop.insert_station(0, Point::ORIGIN);
                    let m = measure_at_base(
                        me,
                        &drop,
                        &deployment,
                        &mplan,
                        dk.child(tag::MEASUREMENT),
                    )?;
                    let est = RangeEstimator::new(m.median_power, m.range, beta, plan.solver)?;
                    Ok(est.active_density(beta))
                })
                .collect::<Result<_>>()?;
            let accuracy: Vec<f64> = inferred
                .iter()
                .map(|l| 1.0 - (l - lambda).abs() / lambda)
                .collect();
            let acc = stats::mean_ci(&accuracy);
            rows.push(DensityValidationRow {
                deployed_density: chi,
                active_density: lambda,
                inferred_mean: stats::mean(&inferred),
                accuracy: acc.mean,
                accuracy_ci: acc.half_width,
                n_samples: n,
                drops: plan.drops,
            });
        }
    }
    Ok(rows)
}
