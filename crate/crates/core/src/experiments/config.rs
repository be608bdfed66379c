use serde::{Deserialize, Serialize};

use crate::analytic::{ZoneSolver, DEFAULT_GRADIENT_THRESHOLD, DEFAULT_MAX_ZONE_RADIUS};
use crate::avoidance::PolicyParams;
use crate::error::{Error, Result};
use crate::phy::{db_to_linear, McsTable, Pathloss, RrbGrid};
use crate::sim::{Deployment, MeasurementPlan, SamplingMode, TierDeployment};

const PER_KM2: f64 = 1e-6;

/// Full description of one experiment run. Every field has a default, so an
/// empty file is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub network: NetworkSection,
    pub geometry: GeometrySection,
    pub sampling: SamplingSection,
    pub zone: ZoneSection,
    pub phy: PhySection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub pathloss_exponent: f64,
    pub pathloss_constant: f64,
    pub noise_w: f64,
    pub tiers: Vec<TierSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TierSection {
    pub name: String,
    pub deployed_density_per_km2: f64,
    pub tx_power_w: f64,
    /// Fraction of RRBs on which a station transmits.
    pub activity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    /// Expected station count of all tiers in the drop disc.
    pub expected_cells: f64,
    /// Guard ring width in mean cell radii.
    pub guard_ring_cells: f64,
    pub measurement_range_m: f64,
    /// UE placement search radius around each station, in mean cell radii.
    pub ue_search_cells: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub n_samples: usize,
    pub n_drops: usize,
    pub mode: SamplingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoneSection {
    pub gradient_threshold: f64,
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhySection {
    /// `builtin` or a path to a `sir_db efficiency` table.
    pub mcs_table: String,
    pub bandwidth_hz: f64,
    pub rrb_count: usize,
    pub rrb_bandwidth_hz: f64,
    pub sir_threshold_db: f64,
    pub ues_per_cell: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Throughput sweep: activity of tier 0.
    pub activity: Vec<f64>,
    /// Density validation: deployed densities of tier 0.
    pub deployed_density_per_km2: Vec<f64>,
    /// Density validation: samples per measurement.
    pub sample_counts: Vec<usize>,
    /// Zone sweep: user ranges in mean cell radii.
    pub serving_range_cells: Vec<f64>,
    /// Zone sweep: zone radii in mean cell radii.
    pub zone_radius_cells: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "default".into(),
            seed: 1,
            network: NetworkSection::default(),
            geometry: GeometrySection::default(),
            sampling: SamplingSection::default(),
            zone: ZoneSection::default(),
            phy: PhySection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            pathloss_exponent: 4.0,
            pathloss_constant: 1e-3,
            noise_w: 0.0,
            tiers: vec![TierSection::default()],
        }
    }
}

impl Default for TierSection {
    fn default() -> Self {
        TierSection {
            name: "macro".into(),
            deployed_density_per_km2: 5.0,
            tx_power_w: 40.0,
            activity: 1.0,
        }
    }
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            expected_cells: 35.0,
            guard_ring_cells: 3.5,
            measurement_range_m: 10.0,
            ue_search_cells: 4.0,
        }
    }
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection {
            n_samples: 1000,
            n_drops: 200,
            mode: SamplingMode::Ensemble,
        }
    }
}

impl Default for ZoneSection {
    fn default() -> Self {
        ZoneSection {
            gradient_threshold: DEFAULT_GRADIENT_THRESHOLD,
            max_radius: DEFAULT_MAX_ZONE_RADIUS,
        }
    }
}

impl Default for PhySection {
    fn default() -> Self {
        PhySection {
            mcs_table: "builtin".into(),
            bandwidth_hz: 20e6,
            rrb_count: 100,
            rrb_bandwidth_hz: 180e3,
            sir_threshold_db: -6.0,
            ues_per_cell: 10.0,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            activity: vec![0.02, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0],
            deployed_density_per_km2: vec![2.0, 5.0, 10.0],
            sample_counts: vec![1000, 5000],
            serving_range_cells: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            zone_radius_cells: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical text form; equal configs serialize identically.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        // Both reject NaN.
        let pos = |x: f64| x > 0.0;
        let nonneg = |x: f64| x >= 0.0;
        if self.network.tiers.is_empty() {
            return bad("network.tiers must list at least one tier");
        }
        if !pos(self.network.pathloss_exponent - 2.0) {
            return bad("network.pathloss_exponent must exceed 2");
        }
        if !pos(self.network.pathloss_constant) {
            return bad("network.pathloss_constant must be positive");
        }
        if !nonneg(self.network.noise_w) {
            return bad("network.noise_w must be non-negative");
        }
        for t in &self.network.tiers {
            if !nonneg(t.deployed_density_per_km2)
                || !pos(t.tx_power_w)
                || !(0.0..=1.0).contains(&t.activity)
            {
                return bad("each tier needs density >= 0, power > 0 and activity in [0, 1]");
            }
        }
        if !pos(self.total_deployed_density()) {
            return bad("total deployed density must be positive");
        }
        let g = &self.geometry;
        if !pos(g.expected_cells)
            || !nonneg(g.guard_ring_cells)
            || !nonneg(g.measurement_range_m)
            || !pos(g.ue_search_cells)
        {
            return bad("geometry values must be positive");
        }
        if g.guard_ring_cells >= g.expected_cells.sqrt() {
            return bad("geometry.guard_ring_cells leaves no measurement region");
        }
        if self.sampling.n_samples == 0 || self.sampling.n_drops == 0 {
            return bad("sampling.n_samples and sampling.n_drops must be at least 1");
        }
        self.solver()?;
        self.grid()?;
        if self.sweep.activity.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return bad("sweep.activity values must be in [0, 1]");
        }
        if self.sweep.deployed_density_per_km2.iter().any(|&c| !pos(c)) {
            return bad("sweep.deployed_density_per_km2 values must be positive");
        }
        if self.sweep.sample_counts.contains(&0) {
            return bad("sweep.sample_counts values must be at least 1");
        }
        if self
            .sweep
            .serving_range_cells
            .iter()
            .chain(&self.sweep.zone_radius_cells)
            .any(|&v| !nonneg(v))
        {
            return bad("sweep ranges must be non-negative");
        }
        Ok(())
    }

    pub fn total_deployed_density(&self) -> f64 {
        self.network
            .tiers
            .iter()
            .map(|t| t.deployed_density_per_km2)
            .sum::<f64>()
            * PER_KM2
    }

    /// `1/sqrt(pi chi)` for the summed deployed density, in metres.
    pub fn mean_cell_radius(&self) -> f64 {
        crate::sim::mean_cell_radius(self.total_deployed_density())
    }

    pub fn pathloss(&self) -> Pathloss {
        Pathloss::PowerLaw {
            constant: self.network.pathloss_constant,
            exponent: self.network.pathloss_exponent,
        }
    }

    pub fn deployment(&self) -> Result<Deployment> {
        let rho = self.mean_cell_radius();
        Deployment::new(
            self.network
                .tiers
                .iter()
                .map(|t| TierDeployment {
                    deployed_density: t.deployed_density_per_km2 * PER_KM2,
                    activity: t.activity,
                    tx_power: t.tx_power_w,
                })
                .collect(),
            self.pathloss(),
            rho * self.geometry.expected_cells.sqrt(),
            rho * self.geometry.guard_ring_cells,
        )
    }

    pub fn solver(&self) -> Result<ZoneSolver> {
        ZoneSolver::new(self.zone.gradient_threshold, self.zone.max_radius)
            .map_err(|e| Error::Config(format!("zone: {e}")))
    }

    pub fn grid(&self) -> Result<RrbGrid> {
        RrbGrid::new(
            self.phy.bandwidth_hz,
            self.phy.rrb_count,
            self.phy.rrb_bandwidth_hz,
        )
        .map_err(|e| Error::Config(format!("phy: {e}")))
    }

    pub fn mcs_table(&self) -> Result<McsTable> {
        if self.phy.mcs_table == "builtin" {
            Ok(McsTable::builtin())
        } else {
            McsTable::from_path(std::path::Path::new(&self.phy.mcs_table))
        }
    }

    pub fn policy(&self) -> Result<PolicyParams> {
        Ok(PolicyParams {
            sir_threshold: db_to_linear(self.phy.sir_threshold_db),
            noise: self.network.noise_w,
            solver: self.solver()?,
        })
    }

    pub fn measurement(&self) -> MeasurementPlan {
        MeasurementPlan {
            n_samples: self.sampling.n_samples,
            range: self.geometry.measurement_range_m,
            mode: self.sampling.mode,
        }
    }

    /// `1/(P Lambda)` of tier `k`.
    pub fn beta(&self, k: usize) -> f64 {
        1.0 / (self.network.tiers[k].tx_power_w * self.network.pathloss_constant)
    }
}
