use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ifest_core::analytic::scaling::{median_at_range, RangeEstimator, ZoneRule};
use ifest_core::analytic::{
    self, AggregateDensity, PathlossParams, TierSpec, ZoneSolver, ZoneSpec,
};
use ifest_core::experiments::{
    run_density_validation_cmd, run_throughput_sweep_cmd, run_zone_sweep, verify_csv,
    ExperimentConfig, ResultTable,
};

#[derive(Parser)]
#[command(
    name = "ifest",
    version,
    about = "Feedback-free interference estimation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Median interference against observation-zone radius.
    ZoneSweep(RunArgs),
    /// Accuracy of density inference from base-station measurements.
    ValidateDensity(RunArgs),
    /// Cell throughput of the avoidance scheme against always-on reuse 1.
    ThroughputSweep(RunArgs),
    /// Evaluate one closed form.
    Analytic {
        #[command(subcommand)]
        expr: Expr,
    },
    /// Re-hash a result table and check its provenance block.
    Verify {
        /// CSV produced by one of the run subcommands.
        table: PathBuf,
        /// Also require that the table came from this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed override applied to --config before comparing.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct ZoneArgs {
    /// Normalized inner limit r.
    #[arg(long)]
    r: f64,
    /// Normalized outer limit R; unbounded when omitted.
    #[arg(long = "big-r")]
    big_r: Option<f64>,
}

impl ZoneArgs {
    fn zone(&self) -> Result<ZoneSpec> {
        Ok(ZoneSpec::new(self.r, self.big_r.unwrap_or(f64::INFINITY))?)
    }
}

#[derive(Args, Clone, Copy)]
struct DensityArgs {
    /// Active density (any consistent area unit).
    #[arg(long)]
    lambda: f64,
    /// Rate 1/(P * pathloss constant).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl DensityArgs {
    fn aggregate(&self) -> Result<AggregateDensity> {
        Ok(AggregateDensity::homogeneous(self.lambda, self.beta)?)
    }
}

#[derive(Subcommand)]
enum Expr {
    /// Integral of 1/(1+u^(alpha/2)) over [r, R].
    QFactor {
        #[command(flatten)]
        zone: ZoneArgs,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
    },
    /// E[exp(-s I)]; tiers given as lambda:beta pairs.
    Mgf {
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        zone: ZoneArgs,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long = "tier", required = true, value_parser = parse_tier)]
        tiers: Vec<(f64, f64)>,
    },
    Pdf {
        #[arg(long)]
        power: f64,
        #[command(flatten)]
        zone: ZoneArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    Cdf {
        #[arg(long)]
        power: f64,
        #[command(flatten)]
        zone: ZoneArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    Median {
        #[command(flatten)]
        zone: ZoneArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Mean of the interference below the zone radius taken as a power bound.
    MeanTruncated {
        #[command(flatten)]
        zone: ZoneArgs,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Normalized zone radius for a normalized serving range.
    ZoneRadius {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = analytic::DEFAULT_GRADIENT_THRESHOLD)]
        phi: f64,
        #[arg(long, default_value_t = analytic::DEFAULT_MAX_ZONE_RADIUS)]
        max_radius: f64,
    },
    /// Active density that yields the measured median.
    InferDensity {
        #[arg(long)]
        measured: f64,
        #[command(flatten)]
        zone: ZoneArgs,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Median interference at a physical range, with its solved zone.
    MedianAtRange {
        #[arg(long)]
        range_m: f64,
        #[arg(long)]
        density_per_km2: f64,
        #[arg(long, default_value_t = 40.0)]
        power_w: f64,
        #[arg(long, default_value_t = 1e-3)]
        pathloss_constant: f64,
        #[arg(long, default_value_t = analytic::DEFAULT_GRADIENT_THRESHOLD)]
        phi: f64,
    },
    /// Interference at a physical range extrapolated from a measured median.
    Estimate {
        #[arg(long)]
        measured_w: f64,
        #[arg(long, default_value_t = 10.0)]
        measurement_range_m: f64,
        #[arg(long)]
        range_m: f64,
        #[arg(long, default_value_t = 40.0)]
        power_w: f64,
        #[arg(long, default_value_t = 1e-3)]
        pathloss_constant: f64,
        #[arg(long, default_value_t = analytic::DEFAULT_GRADIENT_THRESHOLD)]
        phi: f64,
    },
}

fn parse_tier(s: &str) -> std::result::Result<(f64, f64), String> {
    let (l, b) = s.split_once(':').ok_or("expected lambda:beta")?;
    let l = l.parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.parse::<f64>().map_err(|e| e.to_string())?;
    Ok((l, b))
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn run(
    args: &RunArgs,
    runner: fn(&ExperimentConfig) -> ifest_core::Result<ResultTable>,
) -> Result<()> {
    let config = load_config(args.config.as_deref(), args.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.max(1))
        .build()
        .context("building worker pool")?;
    let table = pool.install(|| runner(&config))?;
    let csv = table.to_csv();
    match &args.out {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn print_value(name: &str, value: f64) {
    println!("{name}={value:?}");
}

fn evaluate(expr: &Expr) -> Result<()> {
    match *expr {
        Expr::QFactor { zone, alpha } => print_value("q", analytic::q_factor(zone.zone()?, alpha)?),
        Expr::Mgf {
            s,
            zone,
            alpha,
            ref tiers,
        } => {
            let pl = PathlossParams::new(alpha, 1.0)?;
            let specs = tiers
                .iter()
                .map(|&(l, b)| TierSpec::new(l, 1.0 / b, &pl))
                .collect::<ifest_core::Result<Vec<_>>>()?;
            print_value("mgf", analytic::mgf(s, zone.zone()?, &specs, alpha)?);
        }
        Expr::Pdf {
            power,
            zone,
            density,
        } => print_value(
            "pdf",
            analytic::interference_pdf(power, zone.zone()?, density.aggregate()?)?,
        ),
        Expr::Cdf {
            power,
            zone,
            density,
        } => print_value(
            "cdf",
            analytic::interference_cdf(power, zone.zone()?, density.aggregate()?)?,
        ),
        Expr::Median { zone, density } => print_value(
            "median",
            analytic::median_interference(zone.zone()?, density.aggregate()?),
        ),
        Expr::MeanTruncated { zone, density } => print_value(
            "mean",
            analytic::mean_interference_truncated(zone.zone()?, density.aggregate()?)?,
        ),
        Expr::ZoneRadius { r, phi, max_radius } => {
            print_value("zone_radius", ZoneSolver::new(phi, max_radius)?.radius(r)?)
        }
        Expr::InferDensity {
            measured,
            zone,
            beta,
        } => print_value(
            "lambda",
            analytic::infer_density(measured, zone.zone()?, beta)?,
        ),
        Expr::MedianAtRange {
            range_m,
            density_per_km2,
            power_w,
            pathloss_constant,
            phi,
        } => {
            let beta = 1.0 / (power_w * pathloss_constant);
            let agg = AggregateDensity::homogeneous(density_per_km2 * 1e-6, beta)?;
            let solver = ZoneSolver::new(phi, analytic::DEFAULT_MAX_ZONE_RADIUS)?;
            let m = median_at_range(range_m, agg, beta, ZoneRule::Solved(solver))?;
            let scale = analytic::scaling::RangeScale::new(beta, 4.0)?;
            print_value("median_w", m.power);
            print_value("normalized_range", m.zone.serving_range());
            print_value("normalized_zone_radius", m.zone.zone_radius());
            print_value("zone_radius_m", m.zone_radius_physical(&scale));
        }
        Expr::Estimate {
            measured_w,
            measurement_range_m,
            range_m,
            power_w,
            pathloss_constant,
            phi,
        } => {
            let beta = 1.0 / (power_w * pathloss_constant);
            let solver = ZoneSolver::new(phi, analytic::DEFAULT_MAX_ZONE_RADIUS)?;
            let est = RangeEstimator::new(measured_w, measurement_range_m, beta, solver)?;
            print_value("inferred_density_per_km2", est.active_density(beta) / 1e-6);
            print_value("interference_w", est.interference_at(range_m)?.power);
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ZoneSweep(args) => run(&args, run_zone_sweep),
        Command::ValidateDensity(args) => run(&args, run_density_validation_cmd),
        Command::ThroughputSweep(args) => run(&args, run_throughput_sweep_cmd),
        Command::Analytic { expr } => evaluate(&expr),
        Command::Verify {
            table,
            config,
            seed,
        } => {
            let text = std::fs::read_to_string(&table)
                .with_context(|| format!("reading {}", table.display()))?;
            let expected = match config {
                Some(p) => Some(load_config(Some(&p), seed)?),
                None => None,
            };
            let v = verify_csv(&text, expected.as_ref())?;
            println!(
                "ok experiment={} command={} seed={} rows={} config_sha256={}",
                v.experiment, v.command, v.seed, v.rows, v.config_sha256
            );
            Ok(())
        }
    }
}

fn error_code(err: &anyhow::Error) -> &'static str {
    match err.downcast_ref::<ifest_core::Error>() {
        Some(ifest_core::Error::Config(_)) => "config",
        Some(ifest_core::Error::Provenance(_)) => "provenance",
        Some(ifest_core::Error::McsTable { .. }) => "mcs_table",
        Some(_) => "domain",
        None if err.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "runtime",
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One line per error so callers can parse it.
            let message = format!("{err:#}")
                .replace('"', "'")
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            eprintln!("error code={} message=\"{}\"", error_code(&err), message);
            ExitCode::from(1)
        }
    }
}
