//! First nulls, the two `n2` thresholds and the main-lobe intersection point.

use serde::Serialize;

use super::pattern::gain_direct;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::optimize::bisect;
use crate::scalar::Real;

/// Grid size of the derivative scan used by [`n_th`].
pub const N_TH_SAMPLES: usize = 2000;
/// A scanned derivative counts as positive only above this value.
pub const N_TH_POSITIVE: f64 = 1e-9;
/// Absolute tolerance on the outer phase when solving for the intersection point.
pub const DELTA_INT_TOL: f64 = 1e-12;
/// Below this `n1` the derivative scan is skipped and `n_th = 1`.
const N_TH_MIN_N1: usize = 7;

/// First zeros of `f`, `g` and `cos(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullPoints<T> {
    pub delta1: T,
    pub delta2: T,
    pub delta3: T,
}

pub fn null_points<T: Real>(n1: usize, n2: usize) -> Result<NullPoints<T>> {
    if n1 == 0 {
        return Err(Error::UndefinedNull);
    }
    if n2 == 0 {
        return Err(Error::InvalidConfiguration("n2 must be >= 1".into()));
    }
    let outer = T::from_count((n1 + 1) * n2);
    Ok(NullPoints {
        delta1: T::lit(2.0) / T::from_count(n1),
        delta2: T::lit(2.0) / outer,
        delta3: T::one() / outer,
    })
}

/// `floor(sqrt(10 n1^2 / (n1 + 1)))`, evaluated in exact integer arithmetic.
pub fn n_ap(n1: usize) -> usize {
    let num = 10 * (n1 as u128) * (n1 as u128);
    let den = n1 as u128 + 1;
    // Largest k with k^2 (n1 + 1) <= 10 n1^2.
    let mut k = ((num as f64 / den as f64).sqrt()) as u128;
    while (k + 1) * (k + 1) * den <= num {
        k += 1;
    }
    while k > 0 && k * k * den > num {
        k -= 1;
    }
    k as usize
}

/// Largest `n2` for which the pattern is strictly decreasing over `(0, delta2]`.
///
/// Walks `n2 = 1, 2, ..` and stops at the first `n2` whose central-difference
/// derivative turns positive on the scan grid. Returns 1 when `n1 < 7`.
pub fn n_th(n1: usize) -> usize {
    if n1 < N_TH_MIN_N1 {
        return 1;
    }
    for n2 in 1..=n1 {
        if derivative_turns_positive(n1, n2) {
            return (n2 - 1).max(1);
        }
    }
    n1
}

/// True when `dG/d delta` exceeds [`N_TH_POSITIVE`] somewhere on `(0, delta2]`.
pub fn derivative_turns_positive(n1: usize, n2: usize) -> bool {
    let geom = ArrayGeometry::nested(n1, n2).expect("n1 >= 1");
    let delta2 = 2.0 / ((n1 + 1) * n2) as f64;
    let h = delta2 * 1e-4;
    (1..=N_TH_SAMPLES).any(|i| {
        let x = delta2 * i as f64 / N_TH_SAMPLES as f64;
        let d = (gain_direct(&geom, x + h) - gain_direct(&geom, x - h)) / (2.0 * h);
        d > N_TH_POSITIVE
    })
}

/// Outer term as a function of its phase, `sin(phi) / sin(phi / n2)`.
fn outer_of_phase<T: Real>(n2: usize, phi: T) -> T {
    let den = (phi / T::from_count(n2)).sin();
    if den.abs() < T::lit(1e-300) {
        T::from_count(n2)
    } else {
        phi.sin() / den
    }
}

fn phase_to_delta<T: Real>(n1: usize, n2: usize, phi: T) -> T {
    T::lit(2.0) * phi / (T::PI() * T::from_count(n2 * (n1 + 1)))
}

/// Intersection point of the main-lobe trajectory with the `|f(0)|` contour.
///
/// Solves `cos(phi) = -g(phi) / (2 n1)` on `phi in [pi/2, pi]` and maps the root
/// back to `delta = 2 phi / (pi n2 (n1 + 1))`. Only meaningful when `n2 > n_ap(n1)`.
pub fn delta_int<T: Real>(n1: usize, n2: usize) -> Result<T> {
    if n1 == 0 {
        return Err(Error::UndefinedNull);
    }
    let ap = n_ap(n1);
    if n2 <= ap {
        return Err(Error::Regime { n1, n2, n_ap: ap });
    }
    delta_int_root(n1, n2)
}

/// [`delta_int`] without the regime check.
pub fn delta_int_root<T: Real>(n1: usize, n2: usize) -> Result<T> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidConfiguration("delta_int needs n1, n2 >= 1".into()));
    }
    let fc = T::from_count(n1);
    let two = T::lit(2.0);
    let h = |phi: T| phi.cos() + outer_of_phase(n2, phi) / (two * fc);
    let phi = bisect(h, T::FRAC_PI_2(), T::PI(), T::lit(DELTA_INT_TOL))?;
    Ok(phase_to_delta(n1, n2, phi))
}

/// Root of the same equation written without the minus sign,
/// `cos(phi) = g(phi) / (2 n1)`, if one exists on `[pi/2, pi]`.
///
/// On that interval `cos(phi) <= 0 <= g(phi)`, so this is `None` except in
/// degenerate cases; it is reported next to [`delta_int`] as a diagnostic.
pub fn delta_int_unsigned_form<T: Real>(n1: usize, n2: usize) -> Option<T> {
    if n1 == 0 || n2 == 0 {
        return None;
    }
    let fc = T::from_count(n1);
    let two = T::lit(2.0);
    let h = |phi: T| phi.cos() - outer_of_phase(n2, phi) / (two * fc);
    let steps = 4096;
    let lo = T::FRAC_PI_2();
    let width = T::FRAC_PI_2();
    let mut prev = lo;
    let mut prev_val = h(lo);
    for i in 1..=steps {
        let x = lo + width * T::from_count(i) / T::from_count(steps);
        let v = h(x);
        if prev_val == T::zero() {
            return Some(phase_to_delta(n1, n2, prev));
        }
        if v.signum() != prev_val.signum() {
            let phi = bisect(h, prev, x, T::lit(DELTA_INT_TOL)).ok()?;
            return Some(phase_to_delta(n1, n2, phi));
        }
        prev = x;
        prev_val = v;
    }
    None
}
