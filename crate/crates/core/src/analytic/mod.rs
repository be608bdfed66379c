//! Closed-form interference statistics for Poisson networks with Rayleigh fading.
//!
//! Distances here are the normalized arguments of the Q-factor. [`scaling`]
//! converts physical ranges into them.

mod closed_form;
pub mod scaling;
mod zone;

pub use closed_form::{
    estimate_interference_at, infer_aggregate_density, infer_density, interference_cdf,
    interference_pdf, mean_interference_truncated, median_gradient, median_interference, mgf,
    q_factor, q_factor_alpha4,
};
pub use zone::{ZoneSolver, DEFAULT_GRADIENT_THRESHOLD, DEFAULT_MAX_ZONE_RADIUS};

use crate::error::{invalid, require_non_negative, require_positive, Result};

/// Power-law path loss `constant * distance^-exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossParams {
    exponent: f64,
    constant: f64,
}

impl PathlossParams {
    pub fn new(exponent: f64, constant: f64) -> Result<Self> {
        if exponent.is_nan() || exponent <= 2.0 {
            return Err(crate::Error::DivergentExponent(exponent));
        }
        require_positive("pathloss constant", constant)?;
        Ok(PathlossParams { exponent, constant })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }
}

/// One tier of base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierSpec {
    active_density: f64,
    tx_power: f64,
    pathloss_constant: f64,
}

impl TierSpec {
    pub fn new(active_density: f64, tx_power: f64, pathloss: &PathlossParams) -> Result<Self> {
        require_non_negative("active density", active_density)?;
        require_positive("transmit power", tx_power)?;
        Ok(TierSpec {
            active_density,
            tx_power,
            pathloss_constant: pathloss.constant(),
        })
    }

    pub fn active_density(&self) -> f64 {
        self.active_density
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// Rate of the exponential received-power gain, `1 / (P * constant)`.
    pub fn beta(&self) -> f64 {
        1.0 / (self.tx_power * self.pathloss_constant)
    }
}

/// A K-tier deployment with its activity and decision threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    tiers: Vec<TierSpec>,
    pathloss: PathlossParams,
    deployed_density: Vec<f64>,
    sir_threshold: f64,
}

impl NetworkModel {
    pub fn new(
        tiers: Vec<TierSpec>,
        pathloss: PathlossParams,
        deployed_density: Vec<f64>,
        sir_threshold: f64,
    ) -> Result<Self> {
        if tiers.is_empty() {
            return Err(invalid("tiers", "at least one tier is required"));
        }
        if deployed_density.len() != tiers.len() {
            return Err(invalid(
                "deployed density",
                "one entry per tier is required",
            ));
        }
        for (tier, &chi) in tiers.iter().zip(&deployed_density) {
            require_non_negative("deployed density", chi)?;
            if tier.active_density() > chi {
                return Err(invalid(
                    "active density",
                    format!("{} exceeds deployed density {chi}", tier.active_density()),
                ));
            }
        }
        require_positive("sir threshold", sir_threshold)?;
        Ok(NetworkModel {
            tiers,
            pathloss,
            deployed_density,
            sir_threshold,
        })
    }

    pub fn tiers(&self) -> &[TierSpec] {
        &self.tiers
    }

    pub fn pathloss(&self) -> PathlossParams {
        self.pathloss
    }

    pub fn deployed_density(&self) -> &[f64] {
        &self.deployed_density
    }

    pub fn sir_threshold(&self) -> f64 {
        self.sir_threshold
    }

    pub fn aggregate_density(&self) -> AggregateDensity {
        AggregateDensity::from_tiers(&self.tiers)
    }
}

/// Inner and outer limits of the interference integral, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneSpec {
    serving_range: f64,
    zone_radius: f64,
}

impl ZoneSpec {
    /// `zone_radius` may be `f64::INFINITY`.
    pub fn new(serving_range: f64, zone_radius: f64) -> Result<Self> {
        require_non_negative("serving range", serving_range)?;
        if zone_radius.is_nan() || zone_radius < serving_range {
            return Err(invalid(
                "zone radius",
                format!("{zone_radius} is below the serving range {serving_range}"),
            ));
        }
        Ok(ZoneSpec {
            serving_range,
            zone_radius,
        })
    }

    pub fn unbounded(serving_range: f64) -> Result<Self> {
        ZoneSpec::new(serving_range, f64::INFINITY)
    }

    pub fn serving_range(&self) -> f64 {
        self.serving_range
    }

    pub fn zone_radius(&self) -> f64 {
        self.zone_radius
    }
}

/// `sum_k lambda_k / sqrt(beta_k)`, the only density statistic the closed forms depend on.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AggregateDensity(f64);

impl AggregateDensity {
    pub fn new(value: f64) -> Result<Self> {
        require_non_negative("aggregate density", value)?;
        if value.is_infinite() {
            return Err(invalid("aggregate density", "must be finite"));
        }
        Ok(AggregateDensity(value))
    }

    pub fn homogeneous(active_density: f64, beta: f64) -> Result<Self> {
        require_non_negative("active density", active_density)?;
        require_positive("beta", beta)?;
        AggregateDensity::new(active_density / beta.sqrt())
    }

    pub fn from_tiers(tiers: &[TierSpec]) -> Self {
        AggregateDensity(
            tiers
                .iter()
                .map(|t| t.active_density() / t.beta().sqrt())
                .sum(),
        )
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}
