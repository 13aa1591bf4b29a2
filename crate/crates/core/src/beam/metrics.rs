//! Main-lobe width, peak-to-local-minimum ratio and grating-lobe metrics.

use serde::Serialize;

use super::pattern::{decompose, gain_direct, inner_term, outer_term};
use super::thresholds::{
    delta_int_root, delta_int_unsigned_form, n_ap, n_th, null_points, NullPoints,
};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::optimize::{golden_section_max, golden_section_min};
use crate::scalar::Real;

/// Scan steps per narrowest pattern feature (`1 / max_position`).
pub const FLMP_STEPS_PER_FEATURE: usize = 50;
/// Golden-section tolerance on the refined minimum.
pub const FLMP_TOL: f64 = 1e-10;
/// Grid points across the `±delta2` window searched for each grating lobe.
const LOBE_WINDOW_SAMPLES: usize = 400;

/// Main-lobe regime selected by where `n2` falls relative to `n_th` and `n_ap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `2 <= n2 <= n_th`
    SmallN2,
    /// `n_th < n2 <= n_ap`
    MidN2,
    /// `n2 > n_ap`
    LargeN2,
    /// `n1 = 0` or `n2 <= 1`: positions form a compact ULA.
    UlaEquivalent,
}

impl Regime {
    pub fn classify(n1: usize, n2: usize) -> Regime {
        Self::classify_with(n1, n2, n_th(n1), n_ap(n1))
    }

    fn classify_with(n1: usize, n2: usize, th: usize, ap: usize) -> Regime {
        if n1 == 0 || n2 <= 1 {
            Regime::UlaEquivalent
        } else if n2 <= th {
            Regime::SmallN2
        } else if n2 <= ap {
            Regime::MidN2
        } else {
            Regime::LargeN2
        }
    }
}

/// Pattern values at the characteristic points used by the PLMR bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PTerms<T> {
    /// `g^2(delta1) / M^2`
    pub p1: T,
    /// `f^2(delta2) / M^2`
    pub p2: T,
    /// `(f^2 + g^2)(delta3) / M^2`
    pub p3: T,
    /// `f^2((n2-1) delta2) / M^2`
    pub p4: T,
    /// `(f^2 + n2^2 - 2 n2 f)(n2 delta2) / M^2`
    pub p5: T,
    /// Full pattern at the intersection point.
    pub p_int: T,
}

pub fn p_terms<T: Real>(n1: usize, n2: usize) -> Result<PTerms<T>> {
    let nulls: NullPoints<T> = null_points(n1, n2)?;
    let m = T::from_count(n1 + n2);
    let m2 = m * m;
    let n2f = T::from_count(n2);
    let sq = |x: T| x * x;
    let f = |d: T| inner_term(n1, d);
    let g = |d: T| outer_term(n1, n2, d);
    let d_int: T = delta_int_root(n1, n2)?;
    let x5 = n2f * nulls.delta2;
    Ok(PTerms {
        p1: sq(g(nulls.delta1)) / m2,
        p2: sq(f(nulls.delta2)) / m2,
        p3: (sq(f(nulls.delta3)) + sq(g(nulls.delta3))) / m2,
        p4: sq(f((n2f - T::one()) * nulls.delta2)) / m2,
        p5: (sq(f(x5)) + n2f * n2f - T::lit(2.0) * n2f * f(x5)) / m2,
        p_int: decompose(n1, n2, d_int).gain,
    })
}

/// First strict local minimum of the pattern on `(0, 2]`, refined by golden section.
pub fn flmp_numeric<T: Real>(geom: &ArrayGeometry) -> Result<T> {
    let step = T::one() / T::from_count(FLMP_STEPS_PER_FEATURE * geom.max_position());
    let two = T::lit(2.0);
    let gain = |x: T| gain_direct(geom, x);
    let mut x_prev = step;
    let mut x_cur = step + step;
    let mut g_prev = gain(x_prev);
    let mut g_cur = gain(x_cur);
    let mut i = 3usize;
    loop {
        let x_next = step * T::from_count(i);
        if x_next > two {
            return Err(Error::DegeneratePattern);
        }
        let g_next = gain(x_next);
        if g_cur < g_prev && g_cur <= g_next {
            return Ok(golden_section_min(gain, x_prev, x_next, T::lit(FLMP_TOL)));
        }
        x_prev = x_cur;
        g_prev = g_cur;
        x_cur = x_next;
        g_cur = g_next;
        i += 1;
    }
}

/// Closed-form `[lower, upper]` bracket on the FLMP for the given regime.
pub fn flmp_bounds<T: Real>(n1: usize, n2: usize, regime: Regime) -> Result<(T, T)> {
    if regime == Regime::UlaEquivalent {
        let null = T::lit(2.0) / T::from_count(n1 + n2);
        return Ok((null, null));
    }
    let nulls: NullPoints<T> = null_points(n1, n2)?;
    let n2f = T::from_count(n2);
    Ok(match regime {
        Regime::SmallN2 => ((n2f - T::one()) * nulls.delta2, T::lit(2.0) / T::from_count(n1 + 1)),
        Regime::MidN2 => (nulls.delta3, nulls.delta2),
        Regime::LargeN2 => (delta_int_root(n1, n2)?, nulls.delta2),
        Regime::UlaEquivalent => unreachable!(),
    })
}

fn plmr_bound_for<T: Real>(p: &PTerms<T>, regime: Regime) -> T {
    let inv = |x: T| T::one() / x;
    match regime {
        Regime::SmallN2 => inv(p.p4).max(inv(p.p5)),
        Regime::MidN2 => inv(p.p3).max(inv(p.p2)),
        Regime::LargeN2 => inv(p.p_int).max(inv(p.p2)),
        Regime::UlaEquivalent => T::one(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plmr<T> {
    pub lower_bound: T,
    pub numeric: T,
    pub regime: Regime,
    /// Adjacent regime whose bound was used because `n2` sits on a threshold.
    pub tie_regime: Option<Regime>,
}

/// PLMR lower bound for the regime of `(n1, n2)` and the value at the numeric FLMP.
///
/// When `n2` equals `n_th` or `n_ap`, the neighbouring regime's bound is also
/// evaluated and the larger one that the numeric value satisfies is reported.
pub fn plmr<T: Real>(n1: usize, n2: usize) -> Result<Plmr<T>> {
    let (th, ap) = if n1 == 0 { (1, 0) } else { (n_th(n1), n_ap(n1)) };
    plmr_with(n1, n2, th, ap)
}

fn plmr_with<T: Real>(n1: usize, n2: usize, th: usize, ap: usize) -> Result<Plmr<T>> {
    let regime = Regime::classify_with(n1, n2, th, ap);
    let geom = ArrayGeometry::nested(n1, n2)?;
    let dmin: T = flmp_numeric(&geom)?;
    let numeric = T::one() / gain_direct(&geom, dmin);
    if regime == Regime::UlaEquivalent {
        return Ok(Plmr { lower_bound: T::one(), numeric, regime, tie_regime: None });
    }
    let p = p_terms::<T>(n1, n2)?;
    let mut lower_bound = plmr_bound_for(&p, regime);
    let mut tie_regime = None;
    let neighbour = if n2 == th && th >= 2 {
        Some(Regime::MidN2)
    } else if n2 == ap && ap > th {
        Some(Regime::LargeN2)
    } else {
        None
    };
    if let Some(adj) = neighbour {
        let alt = plmr_bound_for(&p, adj);
        if alt > lower_bound && alt <= numeric {
            lower_bound = alt;
            tie_regime = Some(adj);
        }
    }
    Ok(Plmr { lower_bound, numeric, regime, tie_regime })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GratingLobe<T> {
    pub order: usize,
    pub position_predicted: T,
    pub height_predicted: T,
    pub position_measured: T,
    pub height_measured: T,
    /// False when `n2 <= n_ap(n1)`, where the outer lobes are swamped by the inner pattern.
    pub reliable: bool,
}

/// Predicted and measured dominating side lobes at `2n / (n1 + 1)`, `n = 1..n1`.
pub fn grating_lobes<T: Real>(n1: usize, n2: usize) -> Result<Vec<GratingLobe<T>>> {
    grating_lobes_with(n1, n2, if n1 == 0 { 0 } else { n_ap(n1) })
}

fn grating_lobes_with<T: Real>(n1: usize, n2: usize, ap: usize) -> Result<Vec<GratingLobe<T>>> {
    let geom = ArrayGeometry::nested(n1, n2)?;
    if n1 == 0 || n2 == 0 {
        return Ok(Vec::new());
    }
    let m = T::from_count(n1 + n2);
    let n2f = T::from_count(n2);
    let height_predicted = (n2f - T::one()) * (n2f - T::one()) / (m * m);
    let window = T::lit(2.0) / T::from_count((n1 + 1) * n2);
    let two = T::lit(2.0);
    let gain = |x: T| gain_direct(&geom, x);
    let reliable = n2 > ap;
    let mut out = Vec::new();
    for order in 1..=n1 {
        let centre = T::lit(2.0) * T::from_count(order) / T::from_count(n1 + 1);
        if centre > two {
            break;
        }
        let lo = (centre - window).max(T::zero());
        let hi = (centre + window).min(two);
        let step = (hi - lo) / T::from_count(LOBE_WINDOW_SAMPLES);
        let (best_i, _) = (0..=LOBE_WINDOW_SAMPLES)
            .map(|i| (i, gain(lo + step * T::from_count(i))))
            .fold((0, T::neg_infinity()), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let position_measured = if best_i == 0 || best_i == LOBE_WINDOW_SAMPLES {
            lo + step * T::from_count(best_i)
        } else {
            let a = lo + step * T::from_count(best_i - 1);
            let b = lo + step * T::from_count(best_i + 1);
            golden_section_max(gain, a, b, T::lit(1e-12))
        };
        out.push(GratingLobe {
            order,
            position_predicted: centre,
            height_predicted,
            position_measured,
            height_measured: gain(position_measured),
            reliable,
        });
    }
    Ok(out)
}

/// All beam-pattern metrics of `nested(n1, n2)` in one record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamPatternMetrics<T> {
    pub n1: usize,
    pub n2: usize,
    pub m: usize,
    pub regime: Regime,
    /// Absent for ULA-equivalent configurations.
    pub nulls: Option<NullPoints<T>>,
    pub n_th: usize,
    pub n_ap: usize,
    pub flmp_lower: T,
    pub flmp_upper: T,
    pub flmp_numeric: T,
    pub bw: T,
    pub plmr_lower: T,
    pub plmr_numeric: T,
    pub plmr_tie_regime: Option<Regime>,
    pub p_terms: Option<PTerms<T>>,
    /// Root of `cos(phi) = -g(phi) / (2 f(0))`, reported in the large-`n2` regime.
    pub delta_int: Option<T>,
    /// Root of the sign-flipped equation, when one exists.
    pub delta_int_unsigned_form: Option<T>,
    pub grating_lobes: Vec<GratingLobe<T>>,
    pub slh_predicted: T,
}

pub fn metrics<T: Real>(n1: usize, n2: usize) -> Result<BeamPatternMetrics<T>> {
    let geom = ArrayGeometry::nested(n1, n2)?;
    let m = geom.len();
    let (th, ap) = if n1 == 0 { (1, 0) } else { (n_th(n1), n_ap(n1)) };
    let regime = Regime::classify_with(n1, n2, th, ap);
    let ula = regime == Regime::UlaEquivalent;

    let flmp_numeric: T = flmp_numeric(&geom)?;
    let (flmp_lower, flmp_upper) = flmp_bounds::<T>(n1, n2, regime)?;
    let plmr = plmr_with::<T>(n1, n2, th, ap)?;
    let nulls = if ula { None } else { Some(null_points(n1, n2)?) };
    let p_terms = if ula { None } else { Some(p_terms(n1, n2)?) };
    let delta_int = if regime == Regime::LargeN2 { Some(delta_int_root(n1, n2)?) } else { None };
    let unsigned = if ula { None } else { delta_int_unsigned_form(n1, n2) };
    let grating_lobes = grating_lobes_with::<T>(n1, n2, ap)?;
    let slh_predicted = if n1 == 0 || n2 == 0 {
        T::zero()
    } else {
        let x = T::from_count(n2) - T::one();
        x * x / (T::from_count(m) * T::from_count(m))
    };

    Ok(BeamPatternMetrics {
        n1,
        n2,
        m,
        regime,
        nulls,
        n_th: th,
        n_ap: ap,
        flmp_lower,
        flmp_upper,
        flmp_numeric,
        bw: T::lit(2.0) * flmp_numeric,
        plmr_lower: plmr.lower_bound,
        plmr_numeric: plmr.numeric,
        plmr_tie_regime: plmr.tie_regime,
        p_terms,
        delta_int,
        delta_int_unsigned_form: unsigned,
        grating_lobes,
        slh_predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ula_flmp_is_first_null() {
        for m in [4usize, 9, 16] {
            let g = ArrayGeometry::ula(m).unwrap();
            let x: f64 = flmp_numeric(&g).unwrap();
            assert!((x - 2.0 / m as f64).abs() < 1e-9, "m = {m}: {x}");
        }
    }

    #[test]
    fn flmp_32_32_between_int_and_delta2() {
        let g = ArrayGeometry::nested(32, 32).unwrap();
        let x: f64 = flmp_numeric(&g).unwrap();
        let lo: f64 = delta_int_root(32, 32).unwrap();
        assert!(lo <= x && x <= 2.0 / 1056.0, "{lo} <= {x}");
    }

    #[test]
    fn flmp_32_3_small_regime() {
        let g = ArrayGeometry::nested(32, 3).unwrap();
        let x: f64 = flmp_numeric(&g).unwrap();
        assert!(2.0 * 2.0 / 99.0 <= x && x <= 2.0 * 3.0 / 99.0, "{x}");
        assert_eq!(Regime::classify(32, 3), Regime::SmallN2);
    }

    #[test]
    fn regime_32_5_is_mid() {
        assert_eq!(Regime::classify(32, 5), Regime::MidN2);
        assert_eq!(Regime::classify(32, 17), Regime::MidN2);
        assert_eq!(Regime::classify(32, 18), Regime::LargeN2);
        assert_eq!(Regime::classify(0, 9), Regime::UlaEquivalent);
        assert_eq!(Regime::classify(9, 1), Regime::UlaEquivalent);
    }

    #[test]
    fn p_terms_match_full_pattern() {
        for (n1, n2) in [(8usize, 8usize), (8, 7), (32, 3), (20, 4), (12, 5)] {
            let p = p_terms::<f64>(n1, n2).unwrap();
            let g = ArrayGeometry::nested(n1, n2).unwrap();
            let d2 = 2.0 / ((n1 + 1) * n2) as f64;
            assert!((p.p4 - gain_direct(&g, (n2 as f64 - 1.0) * d2)).abs() < 1e-10);
            assert!((p.p5 - gain_direct(&g, n2 as f64 * d2)).abs() < 1e-10);
            assert!((p.p2 - gain_direct(&g, d2)).abs() < 1e-10);
            assert!((p.p3 - gain_direct(&g, d2 / 2.0)).abs() < 1e-10);
            assert!((p.p1 - gain_direct(&g, 2.0 / n1 as f64)).abs() < 1e-10);
        }
    }

    #[test]
    fn plmr_small_regime_bound() {
        let r = plmr::<f64>(32, 3).unwrap();
        assert_eq!(r.regime, Regime::SmallN2);
        let p = p_terms::<f64>(32, 3).unwrap();
        assert!(r.lower_bound >= (1.0 / p.p4).max(1.0 / p.p5) - 1e-9);
        assert!(r.numeric >= r.lower_bound);
    }

    #[test]
    fn plmr_large_regime() {
        let r = plmr::<f64>(32, 32).unwrap();
        let p = p_terms::<f64>(32, 32).unwrap();
        assert!(r.numeric >= (1.0 / p.p_int).max(1.0 / p.p2));
        assert!(r.numeric >= 1.0);
    }

    #[test]
    fn grating_lobes_ula_have_zero_height() {
        let lobes = grating_lobes::<f64>(15, 1).unwrap();
        assert_eq!(lobes.len(), 15);
        assert!(lobes.iter().all(|l| l.height_predicted == 0.0 && !l.reliable));
    }

    #[test]
    fn grating_lobes_8_8_positions() {
        let lobes = grating_lobes::<f64>(8, 8).unwrap();
        assert_eq!(lobes.len(), 8);
        for (n, l) in lobes.iter().enumerate() {
            assert!((l.position_predicted - 2.0 * (n + 1) as f64 / 9.0).abs() < 1e-15);
            assert!(!l.reliable);
        }
    }

    #[test]
    fn metrics_ula_equivalent() {
        let m = metrics::<f64>(0, 16).unwrap();
        assert_eq!(m.regime, Regime::UlaEquivalent);
        assert!((m.bw - 4.0 / 16.0).abs() < 1e-9);
        assert!(m.nulls.is_none());
        assert!(m.grating_lobes.is_empty());
    }

    #[test]
    fn metrics_8_8_invariants() {
        let m = metrics::<f64>(8, 8).unwrap();
        let n = m.nulls.unwrap();
        assert!(n.delta3 < n.delta2 && n.delta2 < n.delta1);
        assert!(m.flmp_lower <= m.flmp_numeric && m.flmp_numeric <= m.flmp_upper);
        assert!(m.plmr_numeric >= m.plmr_lower && m.plmr_lower >= 1.0);
        assert!((m.slh_predicted - 49.0 / 256.0).abs() < 1e-15);
        assert!(m.delta_int_unsigned_form.is_none());
    }

    #[test]
    fn metrics_32_5_mid() {
        let m = metrics::<f64>(32, 5).unwrap();
        assert_eq!((m.n_th, m.n_ap, m.regime), (4, 17, Regime::MidN2));
        assert!(m.delta_int.is_none());
    }
}
