use std::f64::consts::{FRAC_PI_2, PI};

use super::{AggregateDensity, TierSpec, ZoneSpec};
use crate::error::{invalid, require_non_negative, Error, Result};
use crate::quadrature::integrate;
use crate::special::{erfc, erfc_inv_half};

const QUAD_TOL: f64 = 1e-13;

/// `Q(r, R, alpha)`: the integral of `1 / (1 + u^(alpha/2))` over `[r, R]`.
pub fn q_factor(zone: ZoneSpec, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 2.0 {
        return Err(Error::DivergentExponent(alpha));
    }
    if alpha == 4.0 {
        return Ok(q_factor_alpha4(zone));
    }
    let half = 0.5 * alpha;
    let (r, big_r) = (zone.serving_range(), zone.zone_radius());
    if r == big_r {
        return Ok(0.0);
    }
    let split = r.max(1.0);
    let head = if big_r <= split {
        return integrate(|u| 1.0 / (1.0 + u.powf(half)), r, big_r, QUAD_TOL);
    } else {
        integrate(|u| 1.0 / (1.0 + u.powf(half)), r, split, QUAD_TOL)?
    };
    // Beyond the split, u = w^(-1/(h-1)) turns the algebraic tail into a smooth
    // integrand on a finite interval.
    let k = half - 1.0;
    let w_hi = split.powf(-k);
    let w_lo = if big_r.is_infinite() {
        0.0
    } else {
        big_r.powf(-k)
    };
    let tail = integrate(|w| 1.0 / (1.0 + w.powf(half / k)), w_lo, w_hi, QUAD_TOL)? / k;
    Ok(head + tail)
}

/// `arctan(R) - arctan(r)`, written so that large equal-ish limits do not cancel.
pub fn q_factor_alpha4(zone: ZoneSpec) -> f64 {
    let (r, big_r) = (zone.serving_range(), zone.zone_radius());
    if big_r.is_infinite() {
        if r == 0.0 {
            FRAC_PI_2
        } else {
            (1.0 / r).atan()
        }
    } else {
        ((big_r - r) / (1.0 + r * big_r)).atan()
    }
}

/// Laplace transform `E[exp(-s I)]` of the aggregate interference.
pub fn mgf(s: f64, zone: ZoneSpec, tiers: &[TierSpec], alpha: f64) -> Result<f64> {
    require_non_negative("s", s)?;
    if tiers.is_empty() {
        return Err(invalid("tiers", "at least one tier is required"));
    }
    let q = q_factor(zone, alpha)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let power = 2.0 / alpha;
    let exponent: f64 = tiers
        .iter()
        .map(|t| t.active_density() * (s / t.beta()).powf(power))
        .sum();
    Ok((-PI * q * exponent).exp())
}

/// Density of the aggregate interference for `alpha = 4`.
pub fn interference_pdf(power: f64, zone: ZoneSpec, agg: AggregateDensity) -> Result<f64> {
    if power.is_nan() || power <= 0.0 {
        return Err(invalid("interference power", "must be positive"));
    }
    let qa = q_factor_alpha4(zone) * agg.value();
    let scale = PI * qa;
    Ok(PI.sqrt() * qa / (2.0 * power.powf(1.5)) * (-scale * scale / (4.0 * power)).exp())
}

/// `P(I <= zeta)` for `alpha = 4`.
pub fn interference_cdf(zeta: f64, zone: ZoneSpec, agg: AggregateDensity) -> Result<f64> {
    require_non_negative("zeta", zeta)?;
    if zeta == 0.0 {
        return Ok(0.0);
    }
    let qa = q_factor_alpha4(zone) * agg.value();
    Ok(erfc(PI * qa / (2.0 * zeta.sqrt())))
}

/// Median aggregate interference for `alpha = 4`; zero when the zone is empty.
pub fn median_interference(zone: ZoneSpec, agg: AggregateDensity) -> f64 {
    let root = PI * q_factor_alpha4(zone) * agg.value() / (2.0 * erfc_inv_half());
    root * root
}

/// Derivative of [`median_interference`] with respect to the zone radius.
pub fn median_gradient(zone: ZoneSpec, agg: AggregateDensity) -> f64 {
    let c = PI * agg.value() / (2.0 * erfc_inv_half());
    let big_r = zone.zone_radius();
    if big_r.is_infinite() {
        return 0.0;
    }
    2.0 * c * c * q_factor_alpha4(zone) / (1.0 + big_r * big_r)
}

/// Mean of the interference restricted to powers below the zone radius.
pub fn mean_interference_truncated(zone: ZoneSpec, agg: AggregateDensity) -> Result<f64> {
    let bound = zone.zone_radius();
    require_non_negative("zone radius", bound)?;
    if bound == 0.0 {
        return Ok(0.0);
    }
    if bound.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let qa = q_factor_alpha4(zone) * agg.value();
    let scale = PI * qa;
    let head = (PI * bound).sqrt() * qa * (-scale * scale / (4.0 * bound)).exp();
    let tail = 0.5 * scale * scale * erfc(scale / (2.0 * bound.sqrt()));
    Ok(head - tail)
}

/// Active density that would produce `measured` as the median at `zone_at_d`.
pub fn infer_density(measured: f64, zone_at_d: ZoneSpec, beta: f64) -> Result<f64> {
    let agg = infer_aggregate_density(measured, zone_at_d)?;
    Ok(agg.value() * beta.sqrt())
}

/// Aggregate density that would produce `measured` as the median at `zone_at_d`.
pub fn infer_aggregate_density(measured: f64, zone_at_d: ZoneSpec) -> Result<AggregateDensity> {
    require_non_negative("measured power", measured)?;
    let q = q_factor_alpha4(zone_at_d);
    if q == 0.0 {
        return Err(Error::DegenerateZone);
    }
    AggregateDensity::new(2.0 * measured.sqrt() * erfc_inv_half() / (PI * q))
}

/// Rescales a median measured at `zone_at_d` to `zone_at_r`.
pub fn estimate_interference_at(
    measured: f64,
    zone_at_d: ZoneSpec,
    zone_at_r: ZoneSpec,
) -> Result<f64> {
    require_non_negative("measured power", measured)?;
    let qd = q_factor_alpha4(zone_at_d);
    if qd == 0.0 {
        return Err(Error::DegenerateZone);
    }
    let ratio = q_factor_alpha4(zone_at_r) / qd;
    Ok(measured * ratio * ratio)
}
