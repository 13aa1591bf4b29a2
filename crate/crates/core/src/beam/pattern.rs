use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::scalar::Real;

/// Below this `|sin(x)|` the Dirichlet ratio is replaced by its L'Hôpital limit.
const SINGULAR_SIN: f64 = 1e-9;

/// Inner/outer split of the nested-array pattern at one `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternDecomposition<T> {
    /// Inner-subarray Dirichlet term.
    pub f: T,
    /// Outer-subarray Dirichlet term.
    pub g: T,
    /// Phase offset of the outer term.
    pub phi: T,
    /// `(f^2 + g^2 + 2 f g cos(phi)) / M^2`.
    pub gain: T,
}

/// `|sum_m exp(j pi (p_m - 1) delta)|^2 / M^2`, the normalised pattern at
/// spatial-frequency offset `delta = sin(theta_k) - sin(theta_i)`.
pub fn gain_direct<T: Real>(geom: &ArrayGeometry, delta: T) -> T {
    let pi = T::PI();
    let (mut re, mut im) = (T::zero(), T::zero());
    for &p in geom.positions() {
        let (s, c) = (pi * T::from_count(p - 1) * delta).sin_cos();
        re = re + c;
        im = im + s;
    }
    let m = T::from_count(geom.len());
    (re * re + im * im) / (m * m)
}

/// `sin(n x) / sin(x)` with the analytic limit `n cos(n x) / cos(x)` at the zeros of `sin(x)`.
pub fn dirichlet<T: Real>(n: usize, x: T) -> T {
    let nf = T::from_count(n);
    let den = x.sin();
    if den.abs() < T::lit(SINGULAR_SIN) {
        nf * (nf * x).cos() / x.cos()
    } else {
        (nf * x).sin() / den
    }
}

/// Inner-subarray term `f(delta) = sin(pi n1 delta / 2) / sin(pi delta / 2)`.
pub fn inner_term<T: Real>(n1: usize, delta: T) -> T {
    dirichlet(n1, T::FRAC_PI_2() * delta)
}

/// Outer-subarray term `g(delta) = sin(pi n2 (n1+1) delta / 2) / sin(pi (n1+1) delta / 2)`.
pub fn outer_term<T: Real>(n1: usize, n2: usize, delta: T) -> T {
    dirichlet(n2, T::FRAC_PI_2() * T::from_count(n1 + 1) * delta)
}

/// `phi(delta) = pi n2 (n1+1) delta / 2`.
pub fn outer_phase<T: Real>(n1: usize, n2: usize, delta: T) -> T {
    T::FRAC_PI_2() * T::from_count(n2 * (n1 + 1)) * delta
}

/// Closed-form nested pattern; agrees with [`gain_direct`] on `nested(n1, n2)`.
pub fn gain_decomposed<T: Real>(n1: usize, n2: usize, delta: T) -> Result<PatternDecomposition<T>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidConfiguration(format!(
            "decomposition needs n1, n2 >= 1, got ({n1}, {n2})"
        )));
    }
    Ok(decompose(n1, n2, delta))
}

pub(crate) fn decompose<T: Real>(n1: usize, n2: usize, delta: T) -> PatternDecomposition<T> {
    let f = inner_term(n1, delta);
    let g = outer_term(n1, n2, delta);
    let phi = outer_phase(n1, n2, delta);
    let m = T::from_count(n1 + n2);
    let gain = (f * f + g * g + T::lit(2.0) * f * g * phi.cos()) / (m * m);
    PatternDecomposition { f, g, phi, gain }
}
