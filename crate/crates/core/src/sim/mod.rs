//! Monte Carlo realizations of Poisson deployments.

mod measure;
mod probe;
mod validation;

pub use measure::{
    measure_at_base, measurement_samples, MeasurementPlan, SamplingMode, SpectrumMeasurement,
};
pub use probe::{probe_interference, tier_radius_scale, RangeProbe};
pub use validation::{
    mean_cell_radius, run_density_validation, DensityValidationPlan, DensityValidationRow,
};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::error::{invalid, require_non_negative, require_positive, Error, Result};
use crate::phy::Pathloss;
use crate::rng::SeedKey;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Point {
            x: radius * angle.cos(),
            y: radius * angle.sin(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(&self, by: Point) -> Point {
        Point::new(self.x + by.x, self.y + by.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StationId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub id: StationId,
    pub tier: usize,
    pub position: Point,
}

/// Per-tier deployment parameters; densities are per square metre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierDeployment {
    pub deployed_density: f64,
    /// Probability that a station transmits on a given RRB.
    pub activity: f64,
    pub tx_power: f64,
}

impl TierDeployment {
    pub fn active_density(&self) -> f64 {
        self.deployed_density * self.activity
    }
}

/// Everything needed to draw a network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    tiers: Vec<TierDeployment>,
    pathloss: Pathloss,
    area_radius: f64,
    guard_radius: f64,
}

impl Deployment {
    pub fn new(
        tiers: Vec<TierDeployment>,
        pathloss: Pathloss,
        area_radius: f64,
        guard_radius: f64,
    ) -> Result<Self> {
        if tiers.is_empty() {
            return Err(invalid("tiers", "at least one tier is required"));
        }
        for t in &tiers {
            require_non_negative("deployed density", t.deployed_density)?;
            require_positive("transmit power", t.tx_power)?;
            if !(0.0..=1.0).contains(&t.activity) {
                return Err(invalid(
                    "activity",
                    format!("{} is not in [0, 1]", t.activity),
                ));
            }
        }
        pathloss.validate()?;
        require_positive("area radius", area_radius)?;
        require_non_negative("guard radius", guard_radius)?;
        if guard_radius >= area_radius {
            return Err(invalid("guard radius", "leaves no measurement region"));
        }
        Ok(Deployment {
            tiers,
            pathloss,
            area_radius,
            guard_radius,
        })
    }

    pub fn tiers(&self) -> &[TierDeployment] {
        &self.tiers
    }

    pub fn pathloss(&self) -> Pathloss {
        self.pathloss
    }

    pub fn area_radius(&self) -> f64 {
        self.area_radius
    }

    pub fn guard_radius(&self) -> f64 {
        self.guard_radius
    }

    /// Same deployment with different per-tier activity.
    pub fn with_activity(&self, activity: &[f64]) -> Result<Self> {
        if activity.len() != self.tiers.len() {
            return Err(invalid("activity", "one entry per tier is required"));
        }
        let tiers = self
            .tiers
            .iter()
            .zip(activity)
            .map(|(t, &a)| TierDeployment { activity: a, ..*t })
            .collect();
        Deployment::new(tiers, self.pathloss, self.area_radius, self.guard_radius)
    }

    /// Mean received power from `station` at `point`, before fading.
    pub fn mean_received_power(&self, station: &Station, point: Point) -> f64 {
        self.tiers[station.tier].tx_power * self.pathloss.gain(station.position.distance(point))
    }
}

/// One realization of station positions on a disc centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Drop {
    stations: Vec<Station>,
    area_radius: f64,
    guard_radius: f64,
    seed: u64,
}

impl Drop {
    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn station(&self, id: StationId) -> Result<&Station> {
        self.stations
            .get(id.0 as usize)
            .ok_or(Error::UnknownStation(id.0))
    }

    pub fn area_radius(&self) -> f64 {
        self.area_radius
    }

    pub fn guard_radius(&self) -> f64 {
        self.guard_radius
    }

    /// Radius of the region where interference statistics are unbiased by the edge.
    pub fn inner_radius(&self) -> f64 {
        self.area_radius - self.guard_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn tier_count(&self, tier: usize) -> usize {
        self.stations.iter().filter(|s| s.tier == tier).count()
    }

    /// Adds a station and returns its id.
    pub fn insert_station(&mut self, tier: usize, position: Point) -> StationId {
        let id = StationId(self.stations.len() as u32);
        self.stations.push(Station { id, tier, position });
        id
    }

    /// Removes every tier-`k` station closer than `radii[k]` to `point`.
    /// Ids are reassigned so they stay equal to list positions.
    pub fn clear_around(&mut self, point: Point, radii: &[f64]) {
        self.stations
            .retain(|s| s.position.distance(point) >= radii.get(s.tier).copied().unwrap_or(0.0));
        for (i, s) in self.stations.iter_mut().enumerate() {
            s.id = StationId(i as u32);
        }
    }
}

/// Draws an independent Poisson process per tier on the deployment disc.
pub fn generate_drop(deployment: &Deployment, seed: u64) -> Result<Drop> {
    let key = SeedKey::new(seed);
    let radius = deployment.area_radius;
    let area = std::f64::consts::PI * radius * radius;
    let mut stations = Vec::new();
    for (k, tier) in deployment.tiers.iter().enumerate() {
        let mean = tier.deployed_density * area;
        let mut rng = key.child(k as u64).rng();
        let count = if mean > 0.0 {
            let poisson =
                Poisson::new(mean).map_err(|e| invalid("deployed density", e.to_string()))?;
            poisson.sample(&mut rng) as usize
        } else {
            0
        };
        for _ in 0..count {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            stations.push(Station {
                id: StationId(stations.len() as u32),
                tier: k,
                position: Point::polar(r, theta),
            });
        }
    }
    Ok(Drop {
        stations,
        area_radius: deployment.area_radius,
        guard_radius: deployment.guard_radius,
        seed,
    })
}

/// Which stations transmit on which RRB.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityMask {
    rrb_count: usize,
    bits: Vec<bool>,
}

impl ActivityMask {
    /// Independent Bernoulli draws with each station's tier activity.
    pub fn draw(drop: &Drop, deployment: &Deployment, rrb_count: usize, key: SeedKey) -> Self {
        let mut rng = key.rng();
        let mut bits = Vec::with_capacity(drop.len() * rrb_count);
        for s in drop.stations() {
            let p = deployment.tiers[s.tier].activity;
            for _ in 0..rrb_count {
                bits.push(rng.random::<f64>() < p);
            }
        }
        ActivityMask { rrb_count, bits }
    }

    pub fn all_active(station_count: usize, rrb_count: usize) -> Self {
        ActivityMask {
            rrb_count,
            bits: vec![true; station_count * rrb_count],
        }
    }

    pub fn rrb_count(&self) -> usize {
        self.rrb_count
    }

    pub fn is_active(&self, station: StationId, rrb: usize) -> bool {
        self.bits[station.0 as usize * self.rrb_count + rrb]
    }

    pub fn set(&mut self, station: StationId, rrb: usize, active: bool) {
        self.bits[station.0 as usize * self.rrb_count + rrb] = active;
    }

    /// Fraction of (station, RRB) pairs of `tier` that are active.
    pub fn active_fraction(&self, drop: &Drop, tier: usize) -> f64 {
        let (mut on, mut total) = (0usize, 0usize);
        for s in drop.stations().iter().filter(|s| s.tier == tier) {
            for k in 0..self.rrb_count {
                total += 1;
                on += usize::from(self.is_active(s.id, k));
            }
        }
        on as f64 / total as f64
    }
}

/// Unit-mean exponential power gains, one per station in id order.
pub fn fading_gains(key: SeedKey, station_count: usize) -> Vec<f64> {
    let mut rng = key.rng();
    (0..station_count).map(|_| Exp1.sample(&mut rng)).collect()
}

/// Optional outer limit on which interferers are summed.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    None,
    /// Per-tier radius around the receiver.
    PerTier(Vec<f64>),
}

/// Sum of faded received power from active stations other than `exclude`.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_interference(
    point: Point,
    drop: &Drop,
    deployment: &Deployment,
    mask: &ActivityMask,
    rrb: usize,
    exclude: Option<StationId>,
    fading: SeedKey,
    truncation: &Truncation,
) -> Result<f64> {
    let gains = fading_gains(fading, drop.len());
    interference_with_gains(
        point, drop, deployment, mask, rrb, exclude, &gains, truncation,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn interference_with_gains(
    point: Point,
    drop: &Drop,
    deployment: &Deployment,
    mask: &ActivityMask,
    rrb: usize,
    exclude: Option<StationId>,
    gains: &[f64],
    truncation: &Truncation,
) -> Result<f64> {
    let distance = point.norm();
    if distance > drop.inner_radius() {
        return Err(Error::OutsideMeasurementRegion {
            distance,
            limit: drop.inner_radius(),
        });
    }
    let mut total = crate::stats::CompensatedSum::default();
    for s in drop.stations() {
        if Some(s.id) == exclude || !mask.is_active(s.id, rrb) {
            continue;
        }
        let v = s.position.distance(point);
        if let Truncation::PerTier(radii) = truncation {
            if v > radii[s.tier] {
                continue;
            }
        }
        if v == 0.0 {
            return Err(Error::Singularity { station: s.id.0 });
        }
        let tier = &deployment.tiers[s.tier];
        total.add(gains[s.id.0 as usize] * tier.tx_power * deployment.pathloss.gain(v));
    }
    Ok(total.value())
}

/// A user attached to the station with the strongest mean received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserEquipment {
    pub position: Point,
    pub serving: StationId,
    pub range: f64,
}

/// Attaches a user at `point`; `None` for an empty drop.
pub fn associate(point: Point, drop: &Drop, deployment: &Deployment) -> Option<UserEquipment> {
    let best = drop.stations().iter().max_by(|a, b| {
        deployment
            .mean_received_power(a, point)
            .total_cmp(&deployment.mean_received_power(b, point))
            .then(b.id.cmp(&a.id))
    })?;
    Some(UserEquipment {
        position: point,
        serving: best.id,
        range: best.position.distance(point),
    })
}
