use proptest::prelude::*;

use nested_isac::beam::{
    flmp_numeric, gain_direct, grating_lobes, metrics, n_ap, n_th, p_terms, plmr, Regime,
};
use nested_isac::ArrayGeometry;

fn g(n1: usize, n2: usize, d: f64) -> f64 {
    gain_direct(&ArrayGeometry::nested(n1, n2).unwrap(), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plmr_bound_holds(n1 in 2usize..=48, n2 in 2usize..=48) {
        let p = plmr::<f64>(n1, n2).unwrap();
        prop_assert!(p.numeric >= p.lower_bound * (1.0 - 1e-9), "{n1},{n2}: {p:?}");
    }

    #[test]
    fn p_terms_are_pattern_samples(n1 in 2usize..=40, n2 in 2usize..=40) {
        let d2 = 2.0 / ((n1 + 1) * n2) as f64;
        let p = p_terms::<f64>(n1, n2).unwrap();
        prop_assert!((p.p3 - g(n1, n2, d2 / 2.0)).abs() < 1e-10);
        prop_assert!((p.p2 - g(n1, n2, d2)).abs() < 1e-10);
    }

    #[test]
    fn flmp_is_a_local_minimum(n1 in 0usize..=30, n2 in 2usize..=30) {
        let geom = ArrayGeometry::nested(n1, n2).unwrap();
        let d: f64 = flmp_numeric(&geom).unwrap();
        let h = 1e-6 / geom.max_position() as f64;
        let gd = gain_direct(&geom, d);
        prop_assert!(gd <= gain_direct(&geom, d - h) + 1e-12);
        prop_assert!(gd <= gain_direct(&geom, d + h) + 1e-12);
        // No earlier sampled point dips below it by more than rounding.
        let step = d / 400.0;
        let mut prev = 1.0;
        for i in 1..400 {
            let v = gain_direct(&geom, step * i as f64);
            prop_assert!(v <= prev + 1e-12, "pattern rises before the FLMP at {}", step * i as f64);
            prev = v;
        }
    }
}

#[test]
fn grating_lobes_beyond_n_ap() {
    let mut worst_h = 0.0f64;
    let mut worst_x = 0.0f64;
    for n1 in 2..=40 {
        for n2 in n_ap(n1) + 1..=40 {
            let d2 = 2.0 / ((n1 + 1) * n2) as f64;
            for l in grating_lobes::<f64>(n1, n2).unwrap() {
                assert!(l.reliable);
                worst_h = worst_h.max((l.height_measured - l.height_predicted).abs() / l.height_predicted);
                worst_x = worst_x.max((l.position_measured - l.position_predicted).abs() / d2);
            }
        }
    }
    assert!(worst_h < 0.06, "{worst_h}");
    assert!(worst_x < 0.25, "{worst_x}");
}

#[test]
fn lobe_height_at_exact_position() {
    // At 2n/(n1+1) the inner sum vanishes and every outer term equals one.
    for (n1, n2) in [(3usize, 5usize), (8, 8), (32, 32)] {
        let m = (n1 + n2) as f64;
        for n in 1..=n1 {
            let x = 2.0 * n as f64 / (n1 + 1) as f64;
            let expect = (n2 as f64 - 1.0).powi(2) / (m * m);
            assert!((g(n1, n2, x) - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn n_th_small_and_growing() {
    for n1 in 1..7 {
        assert_eq!(n_th(n1), 1);
    }
    let seq: Vec<usize> = [8, 16, 32, 64, 128].iter().map(|&n| n_th(n)).collect();
    assert!(seq.windows(2).all(|w| w[0] <= w[1]), "{seq:?}");
    for n1 in [8usize, 16, 32, 64] {
        assert!(n_th(n1) < n_ap(n1));
    }
}

#[test]
fn regimes_partition_n2() {
    for n1 in 2..=40 {
        let (th, ap) = (n_th(n1), n_ap(n1));
        for n2 in 2..=40 {
            let expect = if n2 <= th {
                Regime::SmallN2
            } else if n2 <= ap {
                Regime::MidN2
            } else {
                Regime::LargeN2
            };
            assert_eq!(Regime::classify(n1, n2), expect);
        }
    }
}

#[test]
fn metrics_record_is_consistent() {
    for (n1, n2) in [(4usize, 3usize), (8, 8), (32, 5), (32, 32)] {
        let m = metrics::<f64>(n1, n2).unwrap();
        assert!(m.flmp_lower - 1e-9 <= m.flmp_numeric && m.flmp_numeric <= m.flmp_upper + 1e-9);
        assert_eq!(m.bw, 2.0 * m.flmp_numeric);
        assert!(m.plmr_numeric >= m.plmr_lower * (1.0 - 1e-9));
        assert_eq!(m.delta_int.is_some(), m.regime == Regime::LargeN2);
        assert_eq!(m.grating_lobes.len(), n1);
    }
}

#[test]
fn single_precision_agrees() {
    let a = metrics::<f32>(8, 8).unwrap();
    let b = metrics::<f64>(8, 8).unwrap();
    assert_eq!(a.regime, b.regime);
    assert!(((a.flmp_numeric as f64) - b.flmp_numeric).abs() / b.flmp_numeric < 1e-3);
    assert!(((a.slh_predicted as f64) - b.slh_predicted).abs() < 1e-6);
}
