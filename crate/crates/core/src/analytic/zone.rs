use super::{q_factor_alpha4, ZoneSpec};
use crate::error::{invalid, Result};

/// Default threshold on the shape gradient `2 Q(r, R) / (1 + R^2)`.
pub const DEFAULT_GRADIENT_THRESHOLD: f64 = 0.01;
/// Default cap on the normalized zone radius.
pub const DEFAULT_MAX_ZONE_RADIUS: f64 = 100.0;

/// Chooses the observation-zone radius for a given serving range.
///
/// The median grows like `C^2 Q(r, R)^2`, so its radial gradient divided by
/// `C^2` is `g(R) = 2 Q(r, R) / (1 + R^2)`. `g(r) = 0`, `g` rises to a single
/// peak where `2 R Q(r, R) = 1` and then decays. The zone radius is the point
/// on the decaying side where `g` falls to the threshold; if the peak itself
/// is below the threshold the zone is empty and `r` is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneSolver {
    threshold: f64,
    max_radius: f64,
}

impl Default for ZoneSolver {
    fn default() -> Self {
        ZoneSolver {
            threshold: DEFAULT_GRADIENT_THRESHOLD,
            max_radius: DEFAULT_MAX_ZONE_RADIUS,
        }
    }
}

impl ZoneSolver {
    pub fn new(threshold: f64, max_radius: f64) -> Result<Self> {
        if threshold.is_nan() || threshold <= 0.0 {
            return Err(invalid("gradient threshold", "must be positive"));
        }
        if max_radius.is_nan() || max_radius <= 0.0 || max_radius.is_infinite() {
            return Err(invalid("max zone radius", "must be positive and finite"));
        }
        Ok(ZoneSolver {
            threshold,
            max_radius,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// `g(R)` for serving range `r`.
    pub fn shape_gradient(r: f64, zone_radius: f64) -> f64 {
        let q = q_factor_alpha4(ZoneSpec {
            serving_range: r,
            zone_radius,
        });
        2.0 * q / (1.0 + zone_radius * zone_radius)
    }

    /// Zone radius for serving range `r`; always in `[r, max(r, max_radius)]`.
    pub fn radius(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(invalid("serving range", "must be non-negative"));
        }
        if r >= self.max_radius {
            return Ok(r);
        }
        let g = |big_r: f64| Self::shape_gradient(r, big_r);
        let rising = |big_r: f64| {
            let q = q_factor_alpha4(ZoneSpec {
                serving_range: r,
                zone_radius: big_r,
            });
            2.0 * big_r * q < 1.0
        };
        let peak = bisect(r, self.max_radius, rising);
        if g(peak) <= self.threshold {
            return Ok(r);
        }
        if g(self.max_radius) > self.threshold {
            return Ok(self.max_radius);
        }
        Ok(bisect(peak, self.max_radius, |big_r| {
            g(big_r) > self.threshold
        }))
    }

    pub fn zone(&self, r: f64) -> Result<ZoneSpec> {
        ZoneSpec::new(r, self.radius(r)?)
    }
}

// Smallest representable x in (lo, hi] with `below(x)` false, assuming `below`
// is true on a prefix of the interval.
fn bisect(mut lo: f64, mut hi: f64, below: impl Fn(f64) -> bool) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
