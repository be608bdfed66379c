//! Opportunistic muting driven by each station's own interference estimate,
//! and the always-transmit frequency-reuse-1 baseline.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::scaling::RangeEstimator;
use crate::analytic::ZoneSolver;
use crate::error::{invalid, require_non_negative, Error, Result};
use crate::phy::{throughput, McsTable, RrbGrid};
use crate::rng::{tag, SeedKey};
use crate::sim::{
    associate, fading_gains, generate_drop, interference_with_gains, measure_at_base, ActivityMask,
    Deployment, Drop, MeasurementPlan, Point, SpectrumMeasurement, StationId, Truncation,
    UserEquipment,
};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hfr1,
    Proposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Transmit,
    Silent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitDecision {
    pub ue: usize,
    pub rrb: usize,
    pub decision: Decision,
    pub estimated_interference: f64,
    pub predicted_sir: f64,
}

/// Policy constants shared by every station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    /// Linear SIR below which nothing can be decoded.
    pub sir_threshold: f64,
    pub noise: f64,
    pub solver: ZoneSolver,
}

/// What a station knows about its surroundings: its own measurement only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationEstimate {
    station: StationId,
    beta: f64,
    estimator: RangeEstimator,
}

impl StationEstimate {
    /// `beta` is `1/(P * constant)` of the measuring station's own tier.
    pub fn from_measurement(
        m: &SpectrumMeasurement,
        beta: f64,
        solver: ZoneSolver,
    ) -> Result<Self> {
        Ok(StationEstimate {
            station: m.station,
            beta,
            estimator: RangeEstimator::new(m.median_power, m.range, beta, solver)?,
        })
    }

    pub fn station(&self) -> StationId {
        self.station
    }

    pub fn estimator(&self) -> &RangeEstimator {
        &self.estimator
    }

    /// Estimated median interference at `range` from the station.
    pub fn interference_at(&self, range: f64) -> Result<f64> {
        Ok(self.estimator.interference_at(range)?.power)
    }
}

/// Transmit iff `(r^-4 / beta) / (N + E) > threshold`, with `E` extrapolated
/// from the station's own measurement.
pub fn transmit_decision(
    station: StationId,
    ue: usize,
    ue_range: f64,
    rrb: usize,
    estimate: Option<&StationEstimate>,
    policy: &PolicyParams,
) -> Result<TransmitDecision> {
    require_non_negative("ue range", ue_range)?;
    let estimate = estimate
        .filter(|e| e.station == station)
        .ok_or(Error::MissingMeasurement(station.0))?;
    let interference = estimate.interference_at(ue_range)?;
    let signal = ue_range.powi(-4) / estimate.beta;
    let predicted_sir = signal / (policy.noise + interference);
    let decision = if predicted_sir > policy.sir_threshold {
        Decision::Transmit
    } else {
        Decision::Silent
    };
    Ok(TransmitDecision {
        ue,
        rrb,
        decision,
        estimated_interference: interference,
        predicted_sir,
    })
}

/// Users attached to one station.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLoad {
    pub station: StationId,
    pub ues: Vec<UserEquipment>,
}

/// Per-RRB outcome of a scheduler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub ue: Option<usize>,
    pub transmit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub station: StationId,
    pub slots: Vec<Slot>,
}

impl Schedule {
    pub fn transmits(&self, rrb: usize) -> bool {
        self.slots[rrb].transmit
    }
}

fn round_robin(cell: &CellLoad, grid: &RrbGrid) -> Vec<Option<usize>> {
    let n = cell.ues.len();
    (0..grid.rrb_count())
        .map(|k| if n == 0 { None } else { Some(k % n) })
        .collect()
}

/// Every RRB goes to a UE in round-robin order and is always transmitted.
pub fn schedule_hfr1(cell: &CellLoad, grid: &RrbGrid) -> Schedule {
    Schedule {
        station: cell.station,
        slots: round_robin(cell, grid)
            .into_iter()
            .map(|ue| Slot {
                ue,
                transmit: ue.is_some(),
            })
            .collect(),
    }
}

/// Round-robin as in [`schedule_hfr1`], but an RRB whose UE fails the
/// predicted-SIR test stays empty; it is not handed to another UE.
pub fn schedule_proposed(
    cell: &CellLoad,
    grid: &RrbGrid,
    estimate: Option<&StationEstimate>,
    policy: &PolicyParams,
) -> Result<Schedule> {
    if cell.ues.is_empty() {
        return Ok(schedule_hfr1(cell, grid));
    }
    let estimate = estimate.ok_or(Error::MissingMeasurement(cell.station.0))?;
    let decisions = cell
        .ues
        .iter()
        .enumerate()
        .map(|(i, ue)| {
            Ok(transmit_decision(cell.station, i, ue.range, 0, Some(estimate), policy)?.decision)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Schedule {
        station: cell.station,
        slots: round_robin(cell, grid)
            .into_iter()
            .map(|ue| Slot {
                ue,
                transmit: ue.is_some_and(|i| decisions[i] == Decision::Transmit),
            })
            .collect(),
    })
}

/// Poisson number of UEs placed uniformly in the cell of `station`.
///
/// Positions are drawn in a disc of `search_radius` around the station and
/// kept if the station is their strongest server and `accept` holds.
pub fn generate_cell_load(
    station: StationId,
    drop: &Drop,
    deployment: &Deployment,
    mean_ues: f64,
    search_radius: f64,
    key: SeedKey,
    accept: impl Fn(Point) -> bool,
) -> Result<CellLoad> {
    require_non_negative("mean ues", mean_ues)?;
    let centre = drop.station(station)?.position;
    let mut rng = key.rng();
    let count = if mean_ues > 0.0 {
        Poisson::new(mean_ues)
            .map_err(|e| invalid("mean ues", e.to_string()))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let mut ues = Vec::with_capacity(count);
    const MAX_ATTEMPTS: usize = 100_000;
    for _ in 0..count {
        for _ in 0..MAX_ATTEMPTS {
            let r = search_radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let p = centre.offset(Point::polar(r, theta));
            if !accept(p) {
                continue;
            }
            if let Some(ue) = associate(p, drop, deployment) {
                if ue.serving == station && ue.range > 0.0 {
                    ues.push(ue);
                    break;
                }
            }
        }
    }
    Ok(CellLoad { station, ues })
}

/// Throughput of one cell in one quasi-static period.
#[derive(Debug, Clone, PartialEq)]
pub struct CellThroughput {
    pub per_rrb: Vec<f64>,
    pub total: f64,
    /// (UE, RRB) pairs that were scheduled but withheld.
    pub muted: usize,
    pub served: usize,
    /// Served pairs whose realized SIR cleared the threshold.
    pub served_above_threshold: usize,
}

/// Everything outside the observed cell that shapes its SIR.
pub struct Network<'a> {
    pub drop: &'a Drop,
    pub deployment: &'a Deployment,
    pub loads: &'a [CellLoad],
    /// Traffic activity; the observed station is treated as always backlogged.
    pub traffic: &'a ActivityMask,
    pub schedules: &'a [Schedule],
}

/// Sums MCS throughput over the RRBs of `observed`.
pub fn cell_throughput(
    observed: StationId,
    network: &Network<'_>,
    grid: &RrbGrid,
    table: &McsTable,
    noise: f64,
    fading: SeedKey,
) -> Result<CellThroughput> {
    let drop = network.drop;
    let cell = &network.loads[observed.0 as usize];
    let own = &network.schedules[observed.0 as usize];
    let mut effective = network.traffic.clone();
    for s in drop.stations() {
        for k in 0..grid.rrb_count() {
            let on = if s.id == observed {
                own.transmits(k)
            } else {
                network.traffic.is_active(s.id, k)
                    && network.schedules[s.id.0 as usize].transmits(k)
            };
            effective.set(s.id, k, on);
        }
    }
    let serving = drop.station(observed)?;
    let mut out = CellThroughput {
        per_rrb: vec![0.0; grid.rrb_count()],
        total: 0.0,
        muted: 0,
        served: 0,
        served_above_threshold: 0,
    };
    for k in 0..grid.rrb_count() {
        let Some(ue_idx) = own.slots[k].ue else {
            continue;
        };
        if !own.transmits(k) {
            out.muted += 1;
            continue;
        }
        let ue = &cell.ues[ue_idx];
        let gains = fading_gains(fading.child(k as u64), drop.len());
        let signal = gains[observed.0 as usize]
            * network.deployment.mean_received_power(serving, ue.position);
        let interference = interference_with_gains(
            ue.position,
            drop,
            network.deployment,
            &effective,
            k,
            Some(observed),
            &gains,
            &Truncation::None,
        )?;
        let denom = interference + noise;
        let sir = if denom == 0.0 {
            f64::INFINITY
        } else {
            signal / denom
        };
        out.served += 1;
        if sir >= table.cutoff_linear() {
            out.served_above_threshold += 1;
        }
        out.per_rrb[k] = throughput(sir, table, grid.rrb_bandwidth());
    }
    out.total = stats::sum(out.per_rrb.iter().copied());
    Ok(out)
}

/// Throughput sweep over neighbour activity.
#[derive(Debug, Clone)]
pub struct ThroughputPlan {
    /// Single-tier deployment; its activity is overridden by `activities`.
    pub deployment: Deployment,
    pub activities: Vec<f64>,
    pub drops: usize,
    pub mean_ues: f64,
    /// UE placement search radius around each station, in metres.
    pub ue_search_radius: f64,
    pub grid: RrbGrid,
    pub table: McsTable,
    pub policy: PolicyParams,
    pub measurement: MeasurementPlan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputRow {
    pub activity: f64,
    pub active_density: f64,
    pub hfr1: stats::MeanCi,
    pub proposed: stats::MeanCi,
    pub ratio: f64,
    /// Paired 95% half-width of `proposed - hfr1`.
    pub difference_ci: f64,
    pub muted_fraction: f64,
    pub hfr1_served_ok: f64,
    pub proposed_served_ok: f64,
}

struct DropOutcome {
    hfr1: f64,
    proposed: f64,
    muted: usize,
    scheduled: usize,
    hfr1_ok: (usize, usize),
    proposed_ok: (usize, usize),
}

fn simulate_drop(
    plan: &ThroughputPlan,
    deployment: &Deployment,
    key: SeedKey,
) -> Result<DropOutcome> {
    let mut drop = generate_drop(deployment, key.child(tag::DEPLOYMENT).value())?;
    let observed = drop.insert_station(0, Point::ORIGIN);
    let inner = drop.inner_radius();
    let loads = drop
        .stations()
        .iter()
        .map(|s| {
            let region = |p: Point| s.id != observed || p.norm() <= inner;
            generate_cell_load(
                s.id,
                &drop,
                deployment,
                plan.mean_ues,
                plan.ue_search_radius,
                key.child(tag::USERS).child(u64::from(s.id.0)),
                region,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut traffic = ActivityMask::draw(
        &drop,
        deployment,
        plan.grid.rrb_count(),
        key.child(tag::ACTIVITY),
    );
    for k in 0..plan.grid.rrb_count() {
        traffic.set(observed, k, true);
    }
    let beta = 1.0 / (deployment.tiers()[0].tx_power * pathloss_constant(deployment)?);
    let hfr1: Vec<Schedule> = loads.iter().map(|c| schedule_hfr1(c, &plan.grid)).collect();
    let proposed: Vec<Schedule> = loads
        .iter()
        .map(|c| {
            if c.ues.is_empty() {
                return Ok(schedule_hfr1(c, &plan.grid));
            }
            let m = measure_at_base(
                c.station,
                &drop,
                deployment,
                &plan.measurement,
                key.child(tag::MEASUREMENT),
            )?;
            let est = StationEstimate::from_measurement(&m, beta, plan.policy.solver)?;
            schedule_proposed(c, &plan.grid, Some(&est), &plan.policy)
        })
        .collect::<Result<_>>()?;
    let fading = key.child(tag::FADING);
    let run = |schedules: &[Schedule]| {
        cell_throughput(
            observed,
            &Network {
                drop: &drop,
                deployment,
                loads: &loads,
                traffic: &traffic,
                schedules,
            },
            &plan.grid,
            &plan.table,
            plan.policy.noise,
            fading,
        )
    };
    let a = run(&hfr1)?;
    let b = run(&proposed)?;
    Ok(DropOutcome {
        hfr1: a.total,
        proposed: b.total,
        muted: b.muted,
        scheduled: b.muted + b.served,
        hfr1_ok: (a.served_above_threshold, a.served),
        proposed_ok: (b.served_above_threshold, b.served),
    })
}

fn pathloss_constant(deployment: &Deployment) -> Result<f64> {
    match deployment.pathloss() {
        crate::phy::Pathloss::PowerLaw {
            constant,
            exponent: 4.0,
        } => Ok(constant),
        _ => Err(invalid(
            "pathloss",
            "the interference estimate needs the power-law model with exponent 4",
        )),
    }
}

/// Runs both schemes on common drops, users, traffic and fading.
pub fn run_throughput_sweep(plan: &ThroughputPlan, key: SeedKey) -> Result<Vec<ThroughputRow>> {
    if plan.drops == 0 {
        return Err(invalid("drops", "must be at least 1"));
    }
    if plan.deployment.tiers().len() != 1 {
        return Err(invalid("tiers", "the throughput sweep is single-tier"));
    }
    pathloss_constant(&plan.deployment)?;
    if plan.measurement.mode != crate::sim::SamplingMode::Ensemble {
        return Err(invalid(
            "sampling mode",
            "stations near the drop edge can only measure with ensemble sampling",
        ));
    }
    let mut rows = Vec::with_capacity(plan.activities.len());
    for &activity in &plan.activities {
        let deployment = plan.deployment.with_activity(&[activity])?;
        let outcomes = (0..plan.drops)
            .into_par_iter()
            .map(|d| simulate_drop(plan, &deployment, key.child(d as u64)))
            .collect::<Result<Vec<_>>>()?;
        let hfr1: Vec<f64> = outcomes.iter().map(|o| o.hfr1).collect();
        let proposed: Vec<f64> = outcomes.iter().map(|o| o.proposed).collect();
        let diff: Vec<f64> = outcomes.iter().map(|o| o.proposed - o.hfr1).collect();
        let hfr1_ci = stats::mean_ci(&hfr1);
        let proposed_ci = stats::mean_ci(&proposed);
        let frac = |pairs: &mut dyn Iterator<Item = (usize, usize)>| {
            let (ok, n) = pairs.fold((0usize, 0usize), |acc, (a, b)| (acc.0 + a, acc.1 + b));
            ok as f64 / n as f64
        };
        rows.push(ThroughputRow {
            activity,
            active_density: deployment.tiers()[0].active_density(),
            hfr1: hfr1_ci,
            proposed: proposed_ci,
            ratio: proposed_ci.mean / hfr1_ci.mean,
            difference_ci: stats::mean_ci(&diff).half_width,
            muted_fraction: frac(&mut outcomes.iter().map(|o| (o.muted, o.scheduled))),
            hfr1_served_ok: frac(&mut outcomes.iter().map(|o| o.hfr1_ok)),
            proposed_served_ok: frac(&mut outcomes.iter().map(|o| o.proposed_ok)),
        });
    }
    Ok(rows)
}
