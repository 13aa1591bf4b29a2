//! Small summary statistics over trial results.

use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Median of the finite entries; NaN if there are none.
pub fn median(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Paired comparison `a_t - b_t` over trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDiff {
    pub mean: f64,
    /// Standard error of the mean difference.
    pub se: f64,
    pub t: f64,
    /// One-sided p-value for `mean > 0`.
    pub p_greater: f64,
    pub n: usize,
}

impl PairedDiff {
    pub fn new(a: &[f64], b: &[f64]) -> Self {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let n = d.len();
        let m = mean(&d);
        let var = if n > 1 { d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let scale = d.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mut se = (var / n as f64).sqrt();
        // Identical differences leave only rounding noise in the variance.
        if se <= 64.0 * f64::EPSILON * scale {
            se = 0.0;
        }
        let t = if se > 0.0 {
            m / se
        } else if m == 0.0 {
            0.0
        } else {
            m.signum() * f64::INFINITY
        };
        let p_greater = match StudentsT::new(0.0, 1.0, (n.max(2) - 1) as f64) {
            Ok(dist) if t.is_finite() => 1.0 - dist.cdf(t),
            _ if t == f64::INFINITY => 0.0,
            _ if t == f64::NEG_INFINITY => 1.0,
            _ => 0.5,
        };
        Self { mean: m, se, t, p_greater, n }
    }
}
