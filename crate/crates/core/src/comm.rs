//! Uplink MRC combining, SINR and achievable rate.
//!
//! Noise power is normalised to one and every channel already carries
//! `sqrt(receive_snr)`, so transmit powers never appear explicitly.

use num_complex::Complex;
use serde::Serialize;

use crate::beam::gain_direct;
use crate::channel::{los_channel, ChannelRealization};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UeRole {
    Comm,
    Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UserEquipment<T> {
    pub role: UeRole,
    /// AoA of the LoS path (ring centre for one-ring channels), radians.
    pub angle: T,
    pub receive_snr_db: T,
}

impl<T: Real> UserEquipment<T> {
    pub fn receive_snr(&self) -> T {
        db_to_linear(self.receive_snr_db)
    }
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Users of one uplink slot; communication users are listed first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UplinkScenario<T> {
    pub geometry: ArrayGeometry,
    pub ues: Vec<UserEquipment<T>>,
}

impl<T: Real> UplinkScenario<T> {
    pub fn new(geometry: ArrayGeometry, ues: Vec<UserEquipment<T>>) -> Result<Self> {
        if ues.is_empty() {
            return Err(Error::InvalidConfiguration("scenario needs at least one UE".into()));
        }
        let first_loc = ues.iter().position(|u| u.role == UeRole::Loc).unwrap_or(ues.len());
        if ues[first_loc..].iter().any(|u| u.role == UeRole::Comm) {
            return Err(Error::InvalidConfiguration(
                "communication UEs must precede localization UEs".into(),
            ));
        }
        Ok(Self { geometry, ues })
    }

    pub fn num_comm(&self) -> usize {
        self.ues.iter().filter(|u| u.role == UeRole::Comm).count()
    }

    pub fn num_loc(&self) -> usize {
        self.ues.len() - self.num_comm()
    }

    /// Pure LoS channels `sqrt(snr_k) a(theta_k)`.
    pub fn los_channels(&self) -> Result<Vec<ChannelRealization<T>>> {
        self.ues
            .iter()
            .map(|u| los_channel(&self.geometry, u.angle, Complex::new(u.receive_snr().sqrt(), T::zero())))
            .collect()
    }
}

/// `h / ||h||`.
pub fn mrc_combiner<T: Real>(h: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm == T::zero() || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(h.iter().map(|z| z / norm).collect())
}

fn inner<T: Real>(v: &[Complex<T>], h: &[Complex<T>]) -> Complex<T> {
    v.iter().zip(h).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

/// `|v^H h_k|^2 / (sum_{i != k} |v^H h_i|^2 + 1)` for user `k` with combiner `v`.
pub fn sinr_general<T: Real>(k: usize, combiner: &[Complex<T>], channels: &[Vec<Complex<T>>]) -> T {
    let mut signal = T::zero();
    let mut interference = T::zero();
    for (i, h) in channels.iter().enumerate() {
        let p = inner(combiner, h).norm_sqr();
        if i == k {
            signal = p;
        } else {
            interference = interference + p;
        }
    }
    signal / (interference + T::one())
}

/// Squared channel correlation `|h_k^H h_i|^2 / (||h_k||^2 ||h_i||^2)`.
pub fn correlation<T: Real>(hk: &[Complex<T>], hi: &[Complex<T>]) -> T {
    let nk: T = hk.iter().map(|z| z.norm_sqr()).sum();
    let ni: T = hi.iter().map(|z| z.norm_sqr()).sum();
    inner(hk, hi).norm_sqr() / (nk * ni)
}

/// LoS MRC SINR `snr_k M / (M sum_{i != k} snr_i rho_ki + 1)` with `rho` from the beam pattern.
pub fn sinr_los_closed_form<T: Real>(k: usize, angles: &[T], snrs: &[T], geom: &ArrayGeometry) -> T {
    let m = T::from_count(geom.len());
    let sk = angles[k].sin();
    let leak: T = angles
        .iter()
        .zip(snrs)
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, (a, &s))| s * gain_direct(geom, sk - a.sin()))
        .sum();
    snrs[k] * m / (m * leak + T::one())
}

/// `log2(1 + sinr)` in bit/s/Hz.
pub fn achievable_rate<T: Real>(sinr: T) -> T {
    (T::one() + sinr).log2()
}

/// MRC SINR of each of the first `num_comm` users, all users interfering.
pub fn mrc_sinrs<T: Real>(channels: &[Vec<Complex<T>>], num_comm: usize) -> Result<Vec<T>> {
    (0..num_comm)
        .map(|k| {
            let v = mrc_combiner(&channels[k])?;
            Ok(sinr_general(k, &v, channels))
        })
        .collect()
}
