//! Line-of-sight and one-ring multipath channel realizations.
//!
//! Channels are scaled so that `sum_i |beta_i|^2` equals the linear receive SNR
//! of the user (noise power fixed to one), which is how scenarios are specified.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::scalar::Real;

/// Rician factors above this are clamped (an infinite factor means pure LoS).
pub const MAX_RICIAN_DB: f64 = 300.0;

/// One-ring scattering model around a user at `center_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneRingParams<T> {
    /// Total paths including the LoS path.
    pub num_paths: usize,
    pub ring_radius_m: T,
    pub center_range_m: T,
    /// LoS power over total NLoS power, in dB.
    pub rician_factor_db: T,
    /// Azimuth of the ring centre (and of the LoS path), radians from broadside.
    pub center_angle: T,
}

impl<T: Real> Default for OneRingParams<T> {
    fn default() -> Self {
        Self {
            num_paths: 10,
            ring_radius_m: T::lit(5.0),
            center_range_m: T::lit(40.0),
            rician_factor_db: T::lit(20.0),
            center_angle: T::zero(),
        }
    }
}

impl<T: Real> OneRingParams<T> {
    pub fn with_center(self, center_angle: T) -> Self {
        Self { center_angle, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_paths == 0 {
            return Err(Error::InvalidConfiguration("one-ring model needs num_paths >= 1".into()));
        }
        if !(self.ring_radius_m >= T::zero() && self.ring_radius_m < self.center_range_m) {
            return Err(Error::InvalidConfiguration(
                "ring radius must be non-negative and smaller than the centre range".into(),
            ));
        }
        if self.rician_factor_db.is_nan() {
            return Err(Error::InvalidConfiguration("Rician factor is NaN".into()));
        }
        Ok(())
    }

    /// Largest angular offset of a scatterer from the ring centre, `asin(R / r)`.
    pub fn angular_spread(&self) -> T {
        (self.ring_radius_m / self.center_range_m).asin()
    }

    /// Linear Rician factor, with the dB value clamped to [`MAX_RICIAN_DB`].
    pub fn rician_factor(&self) -> T {
        let db = self.rician_factor_db.min(T::lit(MAX_RICIAN_DB));
        T::lit(10.0).powf(db / T::lit(10.0))
    }
}

/// Channel vector together with the paths it was composed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    pub h: Vec<Complex<T>>,
    pub path_angles: Vec<T>,
    pub path_gains: Vec<Complex<T>>,
    pub los_angle: T,
}

impl<T: Real> ChannelRealization<T> {
    /// Recomputes `sum_i beta_i a(theta_i)` from the stored paths.
    pub fn reconstruct(&self, geom: &ArrayGeometry) -> Vec<Complex<T>> {
        compose(geom, &self.path_angles, &self.path_gains)
    }

    pub fn norm_sqr(&self) -> T {
        self.h.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Power carried by the LoS path (index 0).
    pub fn los_power(&self) -> T {
        self.path_gains.first().map_or(T::zero(), |b| b.norm_sqr())
    }

    /// Total power of the NLoS paths.
    pub fn nlos_power(&self) -> T {
        self.path_gains.iter().skip(1).map(|b| b.norm_sqr()).sum()
    }
}

fn compose<T: Real>(geom: &ArrayGeometry, angles: &[T], gains: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut h = vec![Complex::new(T::zero(), T::zero()); geom.len()];
    for (&theta, &beta) in angles.iter().zip(gains) {
        for (hm, a) in h.iter_mut().zip(geom.steering_vector_sin(theta.sin())) {
            *hm = *hm + beta * a;
        }
    }
    h
}

/// Single-path channel `gain * a(angle)`.
pub fn los_channel<T: Real>(geom: &ArrayGeometry, angle: T, gain: Complex<T>) -> Result<ChannelRealization<T>> {
    let a = geom.steering_vector(angle)?;
    Ok(ChannelRealization {
        h: a.into_iter().map(|x| gain * x).collect(),
        path_angles: vec![angle],
        path_gains: vec![gain],
        los_angle: angle,
    })
}

/// One-ring realization with expected total path power `receive_snr` (linear).
///
/// Path 0 is the LoS path at the ring centre with power `K / (K + 1)` of the
/// total (all of it when `num_paths == 1`) and a uniform random phase. The
/// remaining `num_paths - 1` paths come from scatterers drawn uniformly on the
/// ring circumference and carry i.i.d. circularly-symmetric Gaussian gains
/// sharing `1 / (K + 1)` of the power.
/// All draws depend only on `seed`, never on the geometry.
pub fn one_ring_channel<T: Real>(
    geom: &ArrayGeometry,
    params: &OneRingParams<T>,
    receive_snr: T,
    seed: u64,
) -> Result<ChannelRealization<T>> {
    params.validate()?;
    let half_pi = T::FRAC_PI_2();
    if !(params.center_angle > -half_pi && params.center_angle < half_pi) {
        return Err(Error::AngleDomain(params.center_angle.as_f64()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = params.rician_factor();
    let one = T::one();
    let n_nlos = params.num_paths - 1;
    let los_share = if n_nlos == 0 { one } else { k / (k + one) };
    let los_amp = (receive_snr * los_share).sqrt();
    let los_phase = T::lit(rng.random::<f64>() * std::f64::consts::TAU);

    let mut path_angles = vec![params.center_angle];
    let mut path_gains = vec![Complex::from_polar(los_amp, los_phase)];

    if n_nlos > 0 {
        let per_path = receive_snr / ((k + one) * T::from_count(n_nlos));
        let sigma = (per_path / T::lit(2.0)).sqrt();
        let (cx, cy) = (
            params.center_range_m * params.center_angle.sin(),
            params.center_range_m * params.center_angle.cos(),
        );
        for _ in 0..n_nlos {
            let phi = T::lit(rng.random::<f64>() * std::f64::consts::TAU);
            let re = T::lit(rng.sample::<f64, _>(StandardNormal));
            let im = T::lit(rng.sample::<f64, _>(StandardNormal));
            let sx = cx + params.ring_radius_m * phi.cos();
            let sy = cy + params.ring_radius_m * phi.sin();
            path_angles.push(sx.atan2(sy));
            path_gains.push(Complex::new(re * sigma, im * sigma));
        }
    }
    Ok(ChannelRealization {
        h: compose(geom, &path_angles, &path_gains),
        path_angles,
        path_gains,
        los_angle: params.center_angle,
    })
}

/// Writes `ue_id,path_idx,angle_rad,gain_re,gain_im` rows for every path.
pub fn write_channel_dump<T: Real, W: Write>(
    out: W,
    channels: &[ChannelRealization<T>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ue_id", "path_idx", "angle_rad", "gain_re", "gain_im"])?;
    for (ue, ch) in channels.iter().enumerate() {
        for (idx, (angle, gain)) in ch.path_angles.iter().zip(&ch.path_gains).enumerate() {
            w.write_record([
                ue.to_string(),
                idx.to_string(),
                angle.to_string(),
                gain.re.to_string(),
                gain.im.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
