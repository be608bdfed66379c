use thiserror::Error;

/// Errors raised by the analytic, simulation and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path-loss exponent {0} must exceed 2 for the interference integral to converge")]
    DivergentExponent(f64),

    #[error("observation zone has zero width, so density cannot be inferred")]
    DegenerateZone,

    #[error("point lies outside the measurement region (distance {distance} m, limit {limit} m)")]
    OutsideMeasurementRegion { distance: f64, limit: f64 },

    #[error("interferer {station} coincides with the receiver")]
    Singularity { station: u32 },

    #[error("station {0} does not exist in this drop")]
    UnknownStation(u32),

    #[error("serving station {station} is not transmitting on RRB {rrb}")]
    ServingInactive { station: u32, rrb: usize },

    #[error("no spectrum measurement available for station {0}")]
    MissingMeasurement(u32),

    #[error("malformed MCS table at line {line}: {reason}")]
    McsTable { line: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("provenance check failed: {0}")]
    Provenance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects NaN and negative values.
pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_nan() || value < 0.0 {
        Err(invalid(name, format!("must be non-negative, got {value}")))
    } else {
        Ok(value)
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_nan() || value <= 0.0 {
        Err(invalid(name, format!("must be positive, got {value}")))
    } else {
        Ok(value)
    }
}
