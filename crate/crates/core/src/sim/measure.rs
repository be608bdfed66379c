use serde::{Deserialize, Serialize};

use super::{
    aggregate_interference, generate_drop, ActivityMask, Deployment, Drop, Point, StationId,
    Truncation,
};
use crate::error::{invalid, require_non_negative, Result};
use crate::rng::{tag, SeedKey};
use crate::stats;

/// What is redrawn between the samples of one measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Neighbour positions, activity and fading are all redrawn, with the
    /// neighbourhood centred on the measuring station.
    #[default]
    Ensemble,
    /// Neighbour positions stay fixed; activity and fading are redrawn.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan {
    pub n_samples: usize,
    /// Distance from the station to the analyser, in metres.
    pub range: f64,
    pub mode: SamplingMode,
}

/// Interference seen by a station's own analyser over one quasi-static period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumMeasurement {
    pub station: StationId,
    pub rrb: usize,
    pub sample_count: usize,
    pub mean_power: f64,
    pub median_power: f64,
    pub range: f64,
}

/// Raw interference samples at the analyser of `station`.
///
/// Sample `s` depends only on `(key, station, s)`, so a shorter run is a
/// prefix of a longer one.
pub fn measurement_samples(
    station: StationId,
    drop: &Drop,
    deployment: &Deployment,
    plan: &MeasurementPlan,
    key: SeedKey,
) -> Result<Vec<f64>> {
    if plan.n_samples == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    require_non_negative("measurement range", plan.range)?;
    let me = *drop.station(station)?;
    let key = key.child(u64::from(station.0));
    let angle = std::f64::consts::TAU * rand::Rng::random::<f64>(&mut key.child(tag::POINT).rng());
    let point = me.position.offset(Point::polar(plan.range, angle));
    (0..plan.n_samples)
        .map(|s| {
            let sk = key.child(tag::SAMPLE).child(s as u64);
            match plan.mode {
                SamplingMode::Frozen => {
                    let mask = ActivityMask::draw(drop, deployment, 1, sk.child(tag::ACTIVITY));
                    aggregate_interference(
                        point,
                        drop,
                        deployment,
                        &mask,
                        0,
                        Some(station),
                        sk.child(tag::FADING),
                        &Truncation::None,
                    )
                }
                SamplingMode::Ensemble => {
                    // A fresh neighbourhood centred on the station.
                    let mut fresh = generate_drop(deployment, sk.child(tag::DEPLOYMENT).value())?;
                    let id = fresh.insert_station(me.tier, Point::ORIGIN);
                    let mask = ActivityMask::draw(&fresh, deployment, 1, sk.child(tag::ACTIVITY));
                    aggregate_interference(
                        point.offset(Point::new(-me.position.x, -me.position.y)),
                        &fresh,
                        deployment,
                        &mask,
                        0,
                        Some(id),
                        sk.child(tag::FADING),
                        &Truncation::None,
                    )
                }
            }
        })
        .collect()
}

/// Measures at distance `plan.range` from `station`, excluding its own signal.
pub fn measure_at_base(
    station: StationId,
    drop: &Drop,
    deployment: &Deployment,
    plan: &MeasurementPlan,
    key: SeedKey,
) -> Result<SpectrumMeasurement> {
    let mut samples = measurement_samples(station, drop, deployment, plan, key)?;
    let mean_power = stats::mean(&samples);
    let median_power = stats::median(&mut samples);
    Ok(SpectrumMeasurement {
        station,
        rrb: 0,
        sample_count: plan.n_samples,
        mean_power,
        median_power,
        range: plan.range,
    })
}
