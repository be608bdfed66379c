//! Physical ranges to normalized Q-factor arguments.
//!
//! With `G ~ exp(beta)` the Laplace exponent of a Poisson field is
//! `pi lambda (s/beta)^(2/alpha) Q(u_r, u_R, alpha)` where a physical distance
//! `v` maps to `u = v^2 (beta/s)^(2/alpha)`. The MGF is exact under that map.
//! The median closed form is evaluated at its own saddle `s = 1/E`, which
//! turns it into the fixed point `E = C^2 Q(u_r(E), u_R(E))^2`.

use std::f64::consts::PI;

use super::{
    estimate_interference_at, infer_aggregate_density, median_interference, AggregateDensity,
    ZoneSolver, ZoneSpec,
};
use crate::error::{require_non_negative, require_positive, Result};
use crate::special::erfc_inv_half;

/// Normalizes distances for a receiver whose serving tier has rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeScale {
    beta: f64,
    exponent: f64,
}

impl RangeScale {
    pub fn new(beta: f64, exponent: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        if exponent.is_nan() || exponent <= 2.0 {
            return Err(crate::Error::DivergentExponent(exponent));
        }
        Ok(RangeScale { beta, exponent })
    }

    /// `distance^2 * (beta * level)^(2/alpha)` where `level = 1/s`.
    pub fn normalize(&self, distance: f64, level: f64) -> f64 {
        distance * distance * (self.beta * level).powf(2.0 / self.exponent)
    }

    pub fn to_physical(&self, normalized: f64, level: f64) -> f64 {
        (normalized / (self.beta * level).powf(2.0 / self.exponent)).sqrt()
    }
}

/// How the outer limit of the interference integral is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoneRule {
    /// Gradient-threshold zone in normalized units.
    Solved(ZoneSolver),
    /// Fixed physical radius.
    Radius(f64),
    Unbounded,
}

/// A median interference level together with the zone that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeMedian {
    pub power: f64,
    pub zone: ZoneSpec,
}

impl RangeMedian {
    /// Zone radius in physical units.
    pub fn zone_radius_physical(&self, scale: &RangeScale) -> f64 {
        scale.to_physical(self.zone.zone_radius(), self.power)
    }
}

fn zone_at(scale: &RangeScale, range: f64, level: f64, rule: ZoneRule) -> Result<ZoneSpec> {
    let u = scale.normalize(range, level);
    match rule {
        ZoneRule::Solved(solver) => solver.zone(u),
        ZoneRule::Radius(radius) => {
            let outer = scale.normalize(radius, level);
            ZoneSpec::new(u, outer.max(u))
        }
        ZoneRule::Unbounded => ZoneSpec::unbounded(u),
    }
}

// Largest root of `level = map(level)` in (0, upper], with `map(upper) <= upper`.
fn largest_fixed_point(upper: f64, map: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let excess = |e: f64| -> Result<f64> { Ok(e - map(e)?) };
    let mut hi = upper;
    let mut lo = upper;
    let mut found = false;
    for _ in 0..1100 {
        lo *= 0.5;
        if lo == 0.0 {
            break;
        }
        if excess(lo)? < 0.0 {
            found = true;
            break;
        }
        hi = lo;
    }
    if !found {
        return Ok(0.0);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Median interference at physical `range` from the serving station.
///
/// `beta` is the serving tier's rate; under strongest-power association the
/// exclusion radius of every tier maps to the same normalized `u_r`.
pub fn median_at_range(
    range: f64,
    agg: AggregateDensity,
    beta: f64,
    rule: ZoneRule,
) -> Result<RangeMedian> {
    require_non_negative("range", range)?;
    let scale = RangeScale::new(beta, 4.0)?;
    let c = PI * agg.value() / (2.0 * erfc_inv_half());
    let upper = (c * PI / 2.0).powi(2);
    if upper == 0.0 {
        return Ok(RangeMedian {
            power: 0.0,
            zone: zone_at(&scale, range, 0.0, rule)?,
        });
    }
    let power = largest_fixed_point(upper, |e| {
        Ok(median_interference(zone_at(&scale, range, e, rule)?, agg))
    })?;
    Ok(RangeMedian {
        power,
        zone: zone_at(&scale, range, power, rule)?,
    })
}

/// Density inference and range extrapolation from one measured median.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEstimator {
    measured: f64,
    zone_at_measurement: ZoneSpec,
    aggregate: AggregateDensity,
    scale: RangeScale,
    solver: ZoneSolver,
}

impl RangeEstimator {
    /// `measured` is the median interference seen at `measurement_range` from
    /// a station whose tier has rate `beta`.
    pub fn new(
        measured: f64,
        measurement_range: f64,
        beta: f64,
        solver: ZoneSolver,
    ) -> Result<Self> {
        require_non_negative("measured power", measured)?;
        require_non_negative("measurement range", measurement_range)?;
        let scale = RangeScale::new(beta, 4.0)?;
        let zone_at_measurement = zone_at(
            &scale,
            measurement_range,
            measured,
            ZoneRule::Solved(solver),
        )?;
        let aggregate = infer_aggregate_density(measured, zone_at_measurement)?;
        Ok(RangeEstimator {
            measured,
            zone_at_measurement,
            aggregate,
            scale,
            solver,
        })
    }

    pub fn aggregate_density(&self) -> AggregateDensity {
        self.aggregate
    }

    /// Active density of a single-tier network with the given rate.
    pub fn active_density(&self, beta: f64) -> f64 {
        self.aggregate.value() * beta.sqrt()
    }

    pub fn zone_at_measurement(&self) -> ZoneSpec {
        self.zone_at_measurement
    }

    /// Estimated median interference at physical `range`.
    pub fn interference_at(&self, range: f64) -> Result<RangeMedian> {
        require_non_negative("range", range)?;
        if self.measured == 0.0 {
            return Ok(RangeMedian {
                power: 0.0,
                zone: zone_at(&self.scale, range, 0.0, ZoneRule::Solved(self.solver))?,
            });
        }
        let rule = ZoneRule::Solved(self.solver);
        let c = PI * self.aggregate.value() / (2.0 * erfc_inv_half());
        let upper = (c * PI / 2.0).powi(2);
        let power = largest_fixed_point(upper, |e| {
            estimate_interference_at(
                self.measured,
                self.zone_at_measurement,
                zone_at(&self.scale, range, e, rule)?,
            )
        })?;
        Ok(RangeMedian {
            power,
            zone: zone_at(&self.scale, range, power, rule)?,
        })
    }
}
