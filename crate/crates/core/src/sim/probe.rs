use rayon::prelude::*;

use super::{
    fading_gains, generate_drop, interference_with_gains, ActivityMask, Deployment, Point,
    Truncation,
};
use crate::error::{invalid, require_non_negative, Result};
use crate::phy::Pathloss;
use crate::rng::{tag, SeedKey};

/// Interference at a user whose serving station is at a given range.
///
/// The user sits at the drop centre. Every tier-k station closer than
/// `serving_range * (P_k / P_serving)^(1/alpha)` is removed, which is the
/// exact Poisson conditioning for strongest-power association. Each radius
/// in `zone_radii` gives one truncated sum per drop; `f64::INFINITY` keeps
/// the whole drop.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProbe {
    pub serving_tier: usize,
    pub serving_range: f64,
    pub zone_radii: Vec<f64>,
}

/// Per-tier scale that maps serving-tier radii to equal-power radii.
pub fn tier_radius_scale(deployment: &Deployment, serving_tier: usize) -> Result<Vec<f64>> {
    let Pathloss::PowerLaw { exponent, .. } = deployment.pathloss() else {
        return Err(invalid("pathloss", "range probes need the power-law model"));
    };
    let tiers = deployment.tiers();
    let reference = tiers
        .get(serving_tier)
        .ok_or_else(|| invalid("serving tier", "out of range"))?
        .tx_power;
    Ok(tiers
        .iter()
        .map(|t| (t.tx_power / reference).powf(1.0 / exponent))
        .collect())
}

/// Samples indexed `[zone radius][drop]`.
pub fn probe_interference(
    deployment: &Deployment,
    probe: &RangeProbe,
    drops: usize,
    key: SeedKey,
) -> Result<Vec<Vec<f64>>> {
    require_non_negative("serving range", probe.serving_range)?;
    let scale = tier_radius_scale(deployment, probe.serving_tier)?;
    let exclusion: Vec<f64> = scale.iter().map(|f| probe.serving_range * f).collect();
    let truncations: Vec<Truncation> = probe
        .zone_radii
        .iter()
        .map(|&r| {
            if r.is_infinite() {
                Truncation::None
            } else {
                Truncation::PerTier(scale.iter().map(|f| r * f).collect())
            }
        })
        .collect();
    let per_drop = (0..drops)
        .into_par_iter()
        .map(|d| {
            let dk = key.child(d as u64);
            let mut drop = generate_drop(deployment, dk.child(tag::DEPLOYMENT).value())?;
            drop.clear_around(Point::ORIGIN, &exclusion);
            let mask = ActivityMask::draw(&drop, deployment, 1, dk.child(tag::ACTIVITY));
            let gains = fading_gains(dk.child(tag::FADING), drop.len());
            truncations
                .iter()
                .map(|t| {
                    interference_with_gains(
                        Point::ORIGIN,
                        &drop,
                        deployment,
                        &mask,
                        0,
                        None,
                        &gains,
                        t,
                    )
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..probe.zone_radii.len())
        .map(|j| per_drop.iter().map(|row| row[j]).collect())
        .collect())
}
