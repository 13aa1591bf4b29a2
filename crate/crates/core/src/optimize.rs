//! Bracketed one-dimensional root finding and minimisation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// The endpoints must have opposite signs (or one of them must be a root).
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let two = T::lit(2.0);
    // 200 halvings exhaust any f64 bracket.
    for _ in 0..200 {
        let mid = (a + b) / two;
        if (b - a).abs() <= tol || mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / two)
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> T {
    let inv_phi = T::lit((5.0f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let two = T::lit(2.0);
    (a + b) / two
}

/// Golden-section search for a maximum.
pub fn golden_section_max<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> T {
    golden_section_min(|x| -f(x), lo, hi, tol)
}
