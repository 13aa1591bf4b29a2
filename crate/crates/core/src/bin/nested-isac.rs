use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nested_isac::beam::{gain_direct, metrics};
use nested_isac::channel::{los_channel, one_ring_channel, OneRingParams};
use nested_isac::comm::{achievable_rate, db_to_linear, mrc_sinrs};
use nested_isac::experiments::seeds::{derive, stream};
use nested_isac::experiments::trial::draw_angles;
use nested_isac::experiments::{self, ExperimentConfig};
use nested_isac::sensing::{estimate_doa, sample_covariance, simulate_snapshots, Transmitter, DEFAULT_GRID};
use nested_isac::{ArrayGeometry, Error, Result, C64};

#[derive(Parser)]
#[command(name = "nested-isac", version, about = "Nested-array ISAC beam, rate and DoA simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    Los,
    OneRing,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and numeric beam-pattern metrics of nested(N1, N2).
    BeamMetrics {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Samples G(delta) over [-2, 2] as `delta,gain` CSV.
    BeamPattern {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 4001)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-UE MRC rates for UEs drawn uniformly in [-theta_max, theta_max].
    SimulateRate {
        #[arg(long)]
        geometry: ArrayGeometry,
        /// Number of UEs, all communication users.
        #[arg(long, default_value_t = 7)]
        ues: usize,
        #[arg(long, default_value_t = 3.58)]
        theta_max_deg: f64,
        #[arg(long, default_value_t = 20.0)]
        snr_db: f64,
        #[arg(long, value_enum, default_value_t = Channel::OneRing)]
        channel: Channel,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Co-array DoA estimation of LoS sources.
    SimulateDoa {
        #[arg(long)]
        geometry: ArrayGeometry,
        /// Source angles in degrees.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sources: Vec<f64>,
        #[arg(long, default_value_t = 20.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 1000)]
        snapshots: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a configured experiment sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config `out` path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also writes an SVG plot.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn beam_metrics(n1: usize, n2: usize, json: bool, csv: bool) -> Result<()> {
    let m = metrics::<f64>(n1, n2)?;
    let mut out = io::stdout().lock();
    if json {
        let s = serde_json::to_string_pretty(&m).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{s}")?;
        return Ok(());
    }
    let value = serde_json::to_value(&m).map_err(|e| Error::Io(e.to_string()))?;
    let mut flat = Vec::new();
    flatten("", &value, &mut flat);
    if csv {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["key", "value"])?;
        for (k, v) in flat {
            w.write_record([k, v])?;
        }
        w.flush()?;
    } else {
        for (k, v) in flat {
            writeln!(out, "{k:<28} {v}")?;
        }
    }
    Ok(())
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value;
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn beam_pattern(n1: usize, n2: usize, samples: usize, out: &Option<PathBuf>) -> Result<()> {
    if samples < 2 {
        return Err(Error::config("samples", "must be >= 2"));
    }
    let geom = ArrayGeometry::nested(n1, n2)?;
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["delta", "gain"])?;
    for i in 0..samples {
        let delta = -2.0 + 4.0 * i as f64 / (samples - 1) as f64;
        w.write_record([delta.to_string(), gain_direct(&geom, delta).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate_rate(
    geom: &ArrayGeometry,
    ues: usize,
    theta_max_deg: f64,
    snr_db: f64,
    channel: Channel,
    trials: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<()> {
    if ues == 0 {
        return Err(Error::config("ues", "must be >= 1"));
    }
    if !(0.0..90.0).contains(&theta_max_deg) {
        return Err(Error::config("theta-max-deg", "outside [0, 90)"));
    }
    let snr = db_to_linear(snr_db);
    let ring = OneRingParams::default();
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["trial", "ue", "angle_deg", "sinr", "rate"])?;
    for t in 0..trials as u64 {
        let angles = draw_angles(derive(seed, &[stream::ANGLES, t]), ues, theta_max_deg.to_radians());
        let trial_seed = derive(seed, &[stream::TRIAL, t]);
        let channels: Vec<Vec<C64>> = angles
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                Ok(match channel {
                    Channel::Los => los_channel(geom, a, C64::new(snr.sqrt(), 0.0))?.h,
                    Channel::OneRing => {
                        one_ring_channel(geom, &ring.with_center(a), snr, derive(trial_seed, &[stream::CHANNEL, k as u64]))?.h
                    }
                })
            })
            .collect::<Result<_>>()?;
        for (k, sinr) in mrc_sinrs(&channels, ues)?.into_iter().enumerate() {
            w.write_record([
                t.to_string(),
                k.to_string(),
                angles[k].to_degrees().to_string(),
                sinr.to_string(),
                achievable_rate(sinr).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate_doa(
    geom: &ArrayGeometry,
    sources: &[f64],
    snr_db: f64,
    snapshots: usize,
    trials: usize,
    seed: u64,
    grid: usize,
    out: &Option<PathBuf>,
) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::config("sources", "at least one source angle is required"));
    }
    let mut truth: Vec<f64> = sources.iter().map(|d| d.to_radians()).collect();
    truth.sort_by(f64::total_cmp);
    let amp = C64::new(db_to_linear(snr_db).sqrt(), 0.0);
    let txs: Vec<Transmitter> = truth
        .iter()
        .map(|&a| {
            Ok(Transmitter { role: nested_isac::comm::UeRole::Loc, angle: a, channel: los_channel(geom, a, amp)?.h })
        })
        .collect::<Result<_>>()?;
    let coarray = geom.difference_coarray();
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(["trial", "source_idx", "true_deg", "est_deg"])?;
    for t in 0..trials as u64 {
        let batch = simulate_snapshots(geom.len(), &txs, snapshots, derive(seed, &[stream::SNAPSHOTS, t]))?;
        let est = match estimate_doa(&sample_covariance(&batch.samples), &coarray, truth.len(), grid) {
            Ok(e) => Some(e.angles),
            Err(Error::UnderResolution { .. }) => None,
            Err(e) => return Err(e),
        };
        for (i, &a) in truth.iter().enumerate() {
            let e = est.as_ref().map(|v| v[i].to_degrees().to_string()).unwrap_or_default();
            w.write_record([t.to_string(), i.to_string(), a.to_degrees().to_string(), e])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sweep(config: &PathBuf, out: Option<PathBuf>, plot: Option<PathBuf>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if out.is_some() {
        cfg.out = out;
    }
    if plot.is_some() {
        cfg.plot = plot;
    }
    let result = experiments::run(&cfg)?;
    experiments::write_csv(&cfg, &result, cfg.out.as_deref())?;
    if let Some(p) = &cfg.plot {
        experiments::write_plot(&result, p)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BeamMetrics { n1, n2, json, csv } => beam_metrics(n1, n2, json, csv),
        Command::BeamPattern { n1, n2, samples, out } => beam_pattern(n1, n2, samples, &out),
        Command::SimulateRate { geometry, ues, theta_max_deg, snr_db, channel, trials, seed, out } => {
            simulate_rate(&geometry, ues, theta_max_deg, snr_db, channel, trials, seed, &out)
        }
        Command::SimulateDoa { geometry, sources, snr_db, snapshots, trials, seed, grid, out } => {
            simulate_doa(&geometry, &sources, snr_db, snapshots, trials, seed, grid, &out)
        }
        Command::Sweep { config, out, plot } => sweep(&config, out, plot),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // Reader went away (e.g. piped into head).
        Err(Error::Io(m)) if m.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
