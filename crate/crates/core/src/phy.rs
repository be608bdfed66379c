//! Path loss, SIR and the discrete SIR-to-throughput map.

use std::path::Path;

use crate::error::{invalid, require_positive, Error, Result};
use crate::rng::SeedKey;
use crate::sim::{
    fading_gains, interference_with_gains, ActivityMask, Deployment, Drop, Truncation,
    UserEquipment,
};

const BUILTIN_MCS: &str = include_str!("../data/mcs_cqi15.txt");

/// Large-scale path gain as a function of distance in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pathloss {
    /// `constant * d^-exponent`.
    PowerLaw { constant: f64, exponent: f64 },
    /// Log-distance urban micro model, `36.7 log10(d) + 22.7 + 26 log10(f_GHz)` dB.
    UrbanMicro { carrier_ghz: f64 },
}

impl Pathloss {
    pub fn gain(&self, distance: f64) -> f64 {
        match *self {
            Pathloss::PowerLaw { constant, exponent } => constant * distance.powf(-exponent),
            Pathloss::UrbanMicro { carrier_ghz } => {
                let db = 36.7 * distance.log10() + 22.7 + 26.0 * carrier_ghz.log10();
                10f64.powf(-db / 10.0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Pathloss::PowerLaw { constant, exponent } => {
                require_positive("pathloss constant", constant)?;
                if exponent.is_nan() || exponent <= 2.0 {
                    return Err(Error::DivergentExponent(exponent));
                }
            }
            Pathloss::UrbanMicro { carrier_ghz } => {
                require_positive("carrier frequency", carrier_ghz)?;
            }
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsRow {
    pub sir_db: f64,
    pub efficiency: f64,
}

/// Ordered MCS thresholds. The first threshold is the cutoff below which
/// nothing can be decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    rows: Vec<McsRow>,
    thresholds: Vec<f64>,
}

impl McsTable {
    pub fn new(rows: Vec<McsRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::McsTable {
                line: 0,
                reason: "table is empty".into(),
            });
        }
        for (i, pair) in rows.windows(2).enumerate() {
            if pair[1].sir_db <= pair[0].sir_db {
                return Err(Error::McsTable {
                    line: i + 2,
                    reason: "thresholds must be strictly increasing".into(),
                });
            }
            if pair[1].efficiency < pair[0].efficiency {
                return Err(Error::McsTable {
                    line: i + 2,
                    reason: "efficiencies must be nondecreasing".into(),
                });
            }
        }
        if let Some(bad) = rows.iter().position(|r| {
            !r.sir_db.is_finite() || !(r.efficiency.is_finite() && r.efficiency > 0.0)
        }) {
            return Err(Error::McsTable {
                line: bad + 1,
                reason: "values must be finite with positive efficiency".into(),
            });
        }
        let thresholds = rows.iter().map(|r| db_to_linear(r.sir_db)).collect();
        Ok(McsTable { rows, thresholds })
    }

    /// Parses whitespace-separated `sir_db efficiency` rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::McsTable {
                    line: idx + 1,
                    reason: format!("`{s}`: {e}"),
                })
            };
            if fields.len() != 2 {
                return Err(Error::McsTable {
                    line: idx + 1,
                    reason: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            rows.push(McsRow {
                sir_db: parse(fields[0])?,
                efficiency: parse(fields[1])?,
            });
        }
        McsTable::new(rows)
    }

    pub fn builtin() -> Self {
        McsTable::parse(BUILTIN_MCS).expect("bundled MCS table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        McsTable::parse(&text)
    }

    pub fn rows(&self) -> &[McsRow] {
        &self.rows
    }

    pub fn cutoff_db(&self) -> f64 {
        self.rows[0].sir_db
    }

    pub fn cutoff_linear(&self) -> f64 {
        self.thresholds[0]
    }

    pub fn threshold_linear(&self, row: usize) -> f64 {
        self.thresholds[row]
    }

    /// Efficiency of the highest row whose threshold is at or below `sir`.
    pub fn efficiency(&self, sir: f64) -> f64 {
        if sir.is_nan() {
            return 0.0;
        }
        match self.thresholds.partition_point(|&t| t <= sir) {
            0 => 0.0,
            n => self.rows[n - 1].efficiency,
        }
    }
}

/// Resource-block layout of the carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrbGrid {
    bandwidth: f64,
    rrb_count: usize,
    rrb_bandwidth: f64,
}

impl RrbGrid {
    pub fn new(bandwidth: f64, rrb_count: usize, rrb_bandwidth: f64) -> Result<Self> {
        require_positive("bandwidth", bandwidth)?;
        require_positive("rrb bandwidth", rrb_bandwidth)?;
        if rrb_count == 0 {
            return Err(invalid("rrb count", "must be at least 1"));
        }
        if rrb_count as f64 * rrb_bandwidth > bandwidth * (1.0 + 1e-12) {
            return Err(invalid(
                "rrb count",
                format!("{rrb_count} x {rrb_bandwidth} Hz exceeds {bandwidth} Hz"),
            ));
        }
        Ok(RrbGrid {
            bandwidth,
            rrb_count,
            rrb_bandwidth,
        })
    }

    pub fn lte_20mhz() -> Self {
        RrbGrid {
            bandwidth: 20e6,
            rrb_count: 100,
            rrb_bandwidth: 180e3,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn rrb_count(&self) -> usize {
        self.rrb_count
    }

    pub fn rrb_bandwidth(&self) -> f64 {
        self.rrb_bandwidth
    }
}

/// Bits per second carried on one RRB at the given SIR.
pub fn throughput(sir: f64, table: &McsTable, rrb_bandwidth: f64) -> f64 {
    table.efficiency(sir) * rrb_bandwidth
}

/// Realized SIR of `ue` on `rrb`.
#[allow(clippy::too_many_arguments)]
pub fn sir(
    ue: &UserEquipment,
    drop: &Drop,
    deployment: &Deployment,
    mask: &ActivityMask,
    rrb: usize,
    fading: SeedKey,
    noise: f64,
) -> Result<f64> {
    if !mask.is_active(ue.serving, rrb) {
        return Err(Error::ServingInactive {
            station: ue.serving.0,
            rrb,
        });
    }
    let gains = fading_gains(fading, drop.len());
    let serving = drop.station(ue.serving)?;
    let signal =
        gains[ue.serving.0 as usize] * deployment.mean_received_power(serving, ue.position);
    let interference = interference_with_gains(
        ue.position,
        drop,
        deployment,
        mask,
        rrb,
        Some(ue.serving),
        &gains,
        &Truncation::None,
    )?;
    let denom = interference + noise;
    Ok(if denom == 0.0 {
        f64::INFINITY
    } else {
        signal / denom
    })
}
