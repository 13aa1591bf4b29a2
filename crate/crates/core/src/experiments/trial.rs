//! One Monte Carlo trial: channels, MRC rates and optionally the DoA pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ChannelMode, ExperimentConfig};
use super::seeds::{derive, stream};
use crate::channel::{los_channel, one_ring_channel, OneRingParams};
use crate::comm::{achievable_rate, db_to_linear, mrc_sinrs, UeRole};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::sensing::{
    cancel_comm, estimate_doa, sample_covariance, simulate_snapshots, TrialOutcome, Transmitter,
};
use crate::C64;

/// Everything a trial needs apart from the geometry and its seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub k_c: usize,
    pub receive_snr_db: f64,
    pub channel: ChannelMode,
    pub ring: OneRingParams<f64>,
    pub sensing: bool,
    pub snapshots: usize,
    pub grid_size: usize,
}

impl TrialSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            k_c: cfg.k_c,
            receive_snr_db: cfg.receive_snr_db,
            channel: cfg.channel,
            ring: cfg.ring,
            sensing: cfg.sensing,
            snapshots: cfg.snapshots,
            grid_size: cfg.grid_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// Average rate over communication UEs, bit/s/Hz (NaN without any).
    pub mean_rate: f64,
    pub sum_rate: f64,
    pub rates: Vec<f64>,
    pub doa: Option<TrialOutcome>,
}

/// `k` angles uniform in `[-theta_max, theta_max]` (radians).
pub fn draw_angles(seed: u64, k: usize, theta_max: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| if theta_max > 0.0 { rng.random_range(-theta_max..=theta_max) } else { 0.0 })
        .collect()
}

/// Runs one trial for `angles` (communication UEs first).
///
/// Channel and snapshot draws come from `seed` alone, so two geometries given
/// the same seed see paired realizations.
pub fn run_trial(geom: &ArrayGeometry, spec: &TrialSpec, angles: &[f64], seed: u64) -> Result<TrialResult> {
    let snr = db_to_linear(spec.receive_snr_db);
    let channels: Vec<Vec<C64>> = angles
        .iter()
        .enumerate()
        .map(|(ue, &theta)| {
            let ch = match spec.channel {
                ChannelMode::Los => los_channel(geom, theta, C64::new(snr.sqrt(), 0.0))?,
                ChannelMode::OneRing => one_ring_channel(
                    geom,
                    &spec.ring.with_center(theta),
                    snr,
                    derive(seed, &[stream::CHANNEL, ue as u64]),
                )?,
            };
            Ok(ch.h)
        })
        .collect::<Result<_>>()?;

    let k_c = spec.k_c.min(angles.len());
    let rates: Vec<f64> = mrc_sinrs(&channels, k_c)?.into_iter().map(achievable_rate).collect();
    let sum_rate: f64 = rates.iter().sum();
    let mean_rate = sum_rate / k_c as f64;

    let doa = if spec.sensing && k_c < angles.len() {
        Some(sense(geom, spec, angles, &channels, seed)?)
    } else {
        None
    };
    Ok(TrialResult { mean_rate, sum_rate, rates, doa })
}

fn sense(
    geom: &ArrayGeometry,
    spec: &TrialSpec,
    angles: &[f64],
    channels: &[Vec<C64>],
    seed: u64,
) -> Result<TrialOutcome> {
    let txs: Vec<Transmitter> = angles
        .iter()
        .zip(channels)
        .enumerate()
        .map(|(i, (&angle, h))| Transmitter {
            role: if i < spec.k_c { UeRole::Comm } else { UeRole::Loc },
            angle,
            channel: h.clone(),
        })
        .collect();
    let batch = simulate_snapshots(geom.len(), &txs, spec.snapshots, derive(seed, &[stream::SNAPSHOTS]))?;
    let residual = cancel_comm(&batch);
    let truth = residual.truth();
    let r = sample_covariance(&residual.samples);
    match estimate_doa(&r, &geom.difference_coarray(), truth.len(), spec.grid_size) {
        Ok(est) => Ok(TrialOutcome::new(truth, Some(est.angles))),
        Err(Error::UnderResolution { .. }) => Ok(TrialOutcome::new(truth, None)),
        Err(e) => Err(e),
    }
}
