//! The sweep drivers. Every arm of a comparison reuses the same per-trial
//! angles and seeds, so architecture differences are paired samples.

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::plot::{Panel, Series};
use super::seeds::{derive, stream};
use super::stats::{mean, median, PairedDiff};
use super::table::{num, opt, ResultTable};
use super::trial::{draw_angles, run_trial, TrialSpec};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::sensing::{rmse, RmseSummary};

/// Angles (radians) and trial seed shared by every arm.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub angles: Vec<f64>,
    pub seed: u64,
}

pub fn trial_setups(cfg: &ExperimentConfig, theta_max_deg: f64, prefix: &[u64]) -> Vec<TrialSetup> {
    (0..cfg.trials as u64)
        .map(|t| {
            let path = |s: u64| [&[s], prefix, &[t]].concat();
            let angles = match &cfg.angles_deg {
                Some(a) => a.iter().map(|d| d.to_radians()).collect(),
                None => draw_angles(
                    derive(cfg.seed, &path(stream::ANGLES)),
                    cfg.k,
                    theta_max_deg.to_radians(),
                ),
            };
            TrialSetup { angles, seed: derive(cfg.seed, &path(stream::TRIAL)) }
        })
        .collect()
}

/// Aggregates of one geometry over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub geometry: ArrayGeometry,
    pub mean_rate: f64,
    pub sum_rate: f64,
    /// Per-trial mean rate, in trial order.
    pub trial_rates: Vec<f64>,
    pub rmse: Option<RmseSummary>,
    /// Median over trials of the per-trial RMSE (failed trials excluded).
    pub rmse_median: Option<f64>,
    pub trials: usize,
}

pub fn run_arm(geom: &ArrayGeometry, spec: &TrialSpec, setups: &[TrialSetup]) -> Result<ArmSummary> {
    let results = setups
        .par_iter()
        .map(|s| run_trial(geom, spec, &s.angles, s.seed))
        .collect::<Result<Vec<_>>>()?;
    let trial_rates: Vec<f64> = results.iter().map(|r| r.mean_rate).collect();
    let sums: Vec<f64> = results.iter().map(|r| r.sum_rate).collect();
    let outcomes: Vec<_> = results.iter().filter_map(|r| r.doa.clone()).collect();
    let (rmse_all, rmse_median) = if outcomes.is_empty() {
        (None, None)
    } else {
        let per: Vec<f64> = outcomes.iter().filter_map(|o| o.rmse_deg()).collect();
        (Some(rmse(&outcomes)), Some(median(&per)))
    };
    Ok(ArmSummary {
        geometry: geom.clone(),
        mean_rate: mean(&trial_rates),
        sum_rate: mean(&sums),
        trial_rates,
        rmse: rmse_all,
        rmse_median,
        trials: setups.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Row {
    pub n1: usize,
    pub n2: usize,
    pub nested: ArmSummary,
    pub ula_mean_rate: f64,
    /// Nested minus ULA per-trial mean rate.
    pub diff: PairedDiff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub m: usize,
    pub theta_max_deg: f64,
    pub nested: ArmSummary,
    pub ula: ArmSummary,
    pub diff: PairedDiff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Row {
    pub m: usize,
    pub nested: ArmSummary,
    pub ula: ArmSummary,
    pub diff: PairedDiff,
}

/// Where the nested and ULA rate curves cross as `M` grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Linear interpolation of the first sign change of the mean-rate gap.
    pub observed_m: Option<f64>,
    /// Smallest even `M` whose first grating lobe `2/(M/2+1)` fits inside
    /// `sin(theta_max)`, i.e. reaches the sector edge from a broadside user.
    pub predicted_m: Option<usize>,
    /// Same rule against the full spatial width `2 sin(theta_max)`.
    pub predicted_full_width_m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomRow {
    pub label: &'static str,
    pub arm: ArmSummary,
    pub diff: Option<PairedDiff>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentResult {
    Fig3 { m: usize, rows: Vec<Fig3Row> },
    Fig4 { rows: Vec<Fig4Row> },
    Fig5 { rows: Vec<Fig5Row>, crossing: Crossing },
    Custom { rows: Vec<CustomRow> },
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Fig3N1Sweep => run_fig3(cfg),
        ExperimentKind::Fig4MSweep => run_fig4(cfg),
        ExperimentKind::Fig5SensingFirst => run_fig5(cfg),
        ExperimentKind::Custom => run_custom(cfg),
    }
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(Error::config("experiment", format!("expected {}", kind.as_str())));
    }
    Ok(())
}

/// Sweeps `N1 = 0..=M` with `N2 = M - N1` against the compact ULA.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Fig3N1Sweep)?;
    let m = cfg.m[0];
    let spec = TrialSpec::from_config(cfg);
    let setups = trial_setups(cfg, cfg.theta_max_deg[0], &[]);
    let ula = run_arm(&ArrayGeometry::ula(m)?, &spec, &setups)?;
    let n1s: Vec<usize> = cfg.n1.clone().unwrap_or_else(|| (0..=m).collect());
    let mut rows = Vec::with_capacity(n1s.len());
    for n1 in n1s {
        let nested = run_arm(&ArrayGeometry::nested(n1, m - n1)?, &spec, &setups)?;
        let diff = PairedDiff::new(&nested.trial_rates, &ula.trial_rates);
        rows.push(Fig3Row { n1, n2: m - n1, nested, ula_mean_rate: ula.mean_rate, diff });
    }
    Ok(ExperimentResult::Fig3 { m, rows })
}

/// For each sector width and array size, nested versus ULA rates.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Fig4MSweep)?;
    let spec = TrialSpec::from_config(cfg);
    let mut rows = Vec::new();
    for (ti, &theta) in cfg.theta_max_deg.iter().enumerate() {
        let setups = trial_setups(cfg, theta, &[ti as u64]);
        for &m in &cfg.m {
            let (n1, n2) = cfg.nested_split(m);
            let nested = run_arm(&ArrayGeometry::nested(n1, n2)?, &spec, &setups)?;
            let ula = run_arm(&ArrayGeometry::ula(m)?, &spec, &setups)?;
            let diff = PairedDiff::new(&nested.trial_rates, &ula.trial_rates);
            rows.push(Fig4Row { m, theta_max_deg: theta, nested, ula, diff });
        }
    }
    Ok(ExperimentResult::Fig4 { rows })
}

/// Sensing-first nested arrays (`N1 = N2 = M/2`) against the ULA over `M`.
pub fn run_fig5(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Fig5SensingFirst)?;
    let spec = TrialSpec::from_config(cfg);
    let theta = cfg.theta_max_deg[0];
    let setups = trial_setups(cfg, theta, &[]);
    let mut ms = cfg.m.clone();
    ms.sort_unstable();
    let mut rows = Vec::new();
    for m in ms {
        let (n1, n2) = cfg.nested_split(m);
        let nested = run_arm(&ArrayGeometry::nested(n1, n2)?, &spec, &setups)?;
        let ula = run_arm(&ArrayGeometry::ula(m)?, &spec, &setups)?;
        let diff = PairedDiff::new(&nested.trial_rates, &ula.trial_rates);
        rows.push(Fig5Row { m, nested, ula, diff });
    }
    let gaps: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.nested.mean_rate - r.ula.mean_rate)).collect();
    let sin_t = theta.to_radians().sin();
    let crossing = Crossing {
        observed_m: first_crossing(&gaps),
        predicted_m: grating_entry_m(sin_t),
        predicted_full_width_m: grating_entry_m(2.0 * sin_t),
    };
    Ok(ExperimentResult::Fig5 { rows, crossing })
}

/// First sign change of `y` over increasing `x`, linearly interpolated.
pub fn first_crossing(points: &[(f64, f64)]) -> Option<f64> {
    for (i, &(x0, y0)) in points.iter().enumerate() {
        if y0 == 0.0 {
            return Some(x0);
        }
        if let Some(&(x1, y1)) = points.get(i + 1) {
            if y0 * y1 < 0.0 {
                return Some(x0 + (x1 - x0) * y0 / (y0 - y1));
            }
        }
    }
    None
}

/// Smallest even `M` whose sensing-first nested array puts its first grating
/// lobe `2/(M/2+1)` within `width` in `sin(theta)` space.
pub fn grating_entry_m(width: f64) -> Option<usize> {
    if !(width > 0.0) {
        return None;
    }
    (1..=100_000usize).find(|&n1| 2.0 / (n1 as f64 + 1.0) <= width).map(|n1| 2 * n1.max(1))
}

/// Runs `geometry` and, when given, the `compare` baseline on paired trials.
pub fn run_custom(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Custom)?;
    let geom = cfg.geometry.clone().ok_or_else(|| Error::config("geometry", "missing"))?;
    let spec = TrialSpec::from_config(cfg);
    let setups = trial_setups(cfg, cfg.theta_max_deg[0], &[]);
    let primary = run_arm(&geom, &spec, &setups)?;
    let mut rows = Vec::new();
    match &cfg.compare {
        Some(c) => {
            let baseline = run_arm(c, &spec, &setups)?;
            let diff = PairedDiff::new(&primary.trial_rates, &baseline.trial_rates);
            rows.push(CustomRow { label: "primary", arm: primary, diff: Some(diff) });
            rows.push(CustomRow { label: "compare", arm: baseline, diff: None });
        }
        None => rows.push(CustomRow { label: "primary", arm: primary, diff: None }),
    }
    Ok(ExperimentResult::Custom { rows })
}

fn rmse_cols(a: &ArmSummary) -> [String; 3] {
    [
        opt(a.rmse.map(|r| r.rmse_deg)),
        opt(a.rmse_median),
        a.rmse.map(|r| r.failed.to_string()).unwrap_or_default(),
    ]
}

fn diff_cols(d: Option<&PairedDiff>) -> [String; 3] {
    [opt(d.map(|d| d.mean)), opt(d.map(|d| d.se)), opt(d.map(|d| d.t))]
}

impl ExperimentResult {
    pub fn to_table(&self, cfg: &ExperimentConfig) -> ResultTable {
        let mut t;
        match self {
            Self::Fig3 { m, rows } => {
                t = ResultTable::new(&[
                    "n1", "n2", "mean_rate_per_ue", "sum_rate", "rmse_deg", "trials", "rmse_median_deg",
                    "doa_failures", "ula_mean_rate", "paired_diff_mean", "paired_diff_se", "paired_t",
                ]);
                for r in rows {
                    let [rm, med, fail] = rmse_cols(&r.nested);
                    let [dm, dse, dt] = diff_cols(Some(&r.diff));
                    t.push(vec![
                        r.n1.to_string(),
                        r.n2.to_string(),
                        num(r.nested.mean_rate),
                        num(r.nested.sum_rate),
                        rm,
                        r.nested.trials.to_string(),
                        med,
                        fail,
                        num(r.ula_mean_rate),
                        dm,
                        dse,
                        dt,
                    ]);
                }
                t.note("m", m);
            }
            Self::Fig4 { rows } => {
                t = ResultTable::new(&[
                    "m", "theta_max", "arch", "mean_rate", "sum_rate", "trials", "paired_diff_mean", "paired_diff_se",
                ]);
                for r in rows {
                    for (arch, a, d) in [("nested", &r.nested, Some(&r.diff)), ("ula", &r.ula, None)] {
                        let [dm, dse, _] = diff_cols(d);
                        t.push(vec![
                            r.m.to_string(),
                            num(r.theta_max_deg),
                            arch.to_string(),
                            num(a.mean_rate),
                            num(a.sum_rate),
                            a.trials.to_string(),
                            dm,
                            dse,
                        ]);
                    }
                }
                t.note("nested_config", nested_note(cfg));
            }
            Self::Fig5 { rows, crossing } => {
                t = ResultTable::new(&[
                    "m", "arch", "mean_rate", "rmse_deg", "sum_rate", "rmse_median_deg", "doa_failures", "trials",
                ]);
                for r in rows {
                    for (arch, a) in [("nested", &r.nested), ("ula", &r.ula)] {
                        let [rm, med, fail] = rmse_cols(a);
                        t.push(vec![
                            r.m.to_string(),
                            arch.to_string(),
                            num(a.mean_rate),
                            rm,
                            num(a.sum_rate),
                            med,
                            fail,
                            a.trials.to_string(),
                        ]);
                    }
                }
                t.note("nested_config", nested_note(cfg));
                t.note("crossing_observed_m", opt(crossing.observed_m));
                t.note("crossing_predicted_m", crossing.predicted_m.map(|m| m.to_string()).unwrap_or_default());
                t.note(
                    "crossing_predicted_full_width_m",
                    crossing.predicted_full_width_m.map(|m| m.to_string()).unwrap_or_default(),
                );
            }
            Self::Custom { rows } => {
                t = ResultTable::new(&[
                    "arch", "geometry", "m", "mean_rate", "sum_rate", "rmse_deg", "rmse_median_deg", "doa_failures",
                    "trials", "paired_diff_mean", "paired_diff_se", "paired_t",
                ]);
                for r in rows {
                    let [rm, med, fail] = rmse_cols(&r.arm);
                    let [dm, dse, dt] = diff_cols(r.diff.as_ref());
                    t.push(vec![
                        r.label.to_string(),
                        r.arm.geometry.to_string(),
                        r.arm.geometry.len().to_string(),
                        num(r.arm.mean_rate),
                        num(r.arm.sum_rate),
                        rm,
                        med,
                        fail,
                        r.arm.trials.to_string(),
                        dm,
                        dse,
                        dt,
                    ]);
                }
            }
        }
        t.note("experiment", cfg.experiment.as_str());
        t
    }

    pub fn panels(&self) -> Vec<Panel> {
        let series = |name: &str, pts: Vec<(f64, f64)>| Series { name: name.to_string(), points: pts };
        match self {
            Self::Fig3 { m, rows } => {
                let x = |r: &Fig3Row| r.n1 as f64;
                let mut panels = vec![Panel {
                    title: format!("Rate vs N1 (M = {m})"),
                    x_label: "N1".into(),
                    y_label: "mean rate per UE [bit/s/Hz]".into(),
                    series: vec![
                        series("nested", rows.iter().map(|r| (x(r), r.nested.mean_rate)).collect()),
                        series("ULA", rows.iter().map(|r| (x(r), r.ula_mean_rate)).collect()),
                    ],
                }];
                if rows.iter().any(|r| r.nested.rmse.is_some()) {
                    panels.push(Panel {
                        title: "RMSE vs N1".into(),
                        x_label: "N1".into(),
                        y_label: "RMSE [deg]".into(),
                        series: vec![series(
                            "nested",
                            rows.iter().map(|r| (x(r), r.nested.rmse.map_or(f64::NAN, |s| s.rmse_deg))).collect(),
                        )],
                    });
                }
                panels
            }
            Self::Fig4 { rows } => {
                let mut s = Vec::new();
                let mut thetas: Vec<f64> = rows.iter().map(|r| r.theta_max_deg).collect();
                thetas.dedup();
                for th in thetas {
                    let sel: Vec<&Fig4Row> = rows.iter().filter(|r| r.theta_max_deg == th).collect();
                    s.push(series(&format!("nested {th} deg"), sel.iter().map(|r| (r.m as f64, r.nested.mean_rate)).collect()));
                    s.push(series(&format!("ULA {th} deg"), sel.iter().map(|r| (r.m as f64, r.ula.mean_rate)).collect()));
                }
                vec![Panel { title: "Rate vs M".into(), x_label: "M".into(), y_label: "mean rate per UE [bit/s/Hz]".into(), series: s }]
            }
            Self::Fig5 { rows, .. } => {
                let pick = |f: &dyn Fn(&ArmSummary) -> f64, nested: bool| -> Vec<(f64, f64)> {
                    rows.iter().map(|r| (r.m as f64, f(if nested { &r.nested } else { &r.ula }))).collect()
                };
                let rate = |a: &ArmSummary| a.mean_rate;
                let err = |a: &ArmSummary| a.rmse.map_or(f64::NAN, |s| s.rmse_deg);
                vec![
                    Panel {
                        title: "Rate vs M".into(),
                        x_label: "M".into(),
                        y_label: "mean rate per UE [bit/s/Hz]".into(),
                        series: vec![series("nested", pick(&rate, true)), series("ULA", pick(&rate, false))],
                    },
                    Panel {
                        title: "RMSE vs M".into(),
                        x_label: "M".into(),
                        y_label: "RMSE [deg]".into(),
                        series: vec![series("nested", pick(&err, true)), series("ULA", pick(&err, false))],
                    },
                ]
            }
            Self::Custom { .. } => Vec::new(),
        }
    }
}

fn nested_note(cfg: &ExperimentConfig) -> String {
    match cfg.nested_n1 {
        Some(n1) => format!("n1={n1};n2=M-{n1}"),
        None => "n1=floor(M/2);n2=M-n1".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolation() {
        assert_eq!(first_crossing(&[(8.0, 1.0), (12.0, 0.5), (16.0, -0.5)]), Some(14.0));
        assert_eq!(first_crossing(&[(8.0, 1.0), (12.0, 0.0), (16.0, -0.5)]), Some(12.0));
        assert_eq!(first_crossing(&[(8.0, 1.0), (12.0, 2.0)]), None);
        assert_eq!(first_crossing(&[(8.0, -1.0), (12.0, 1.0)]), Some(10.0));
    }

    #[test]
    fn grating_entry() {
        // 2/(N1+1) <= sin(18 deg) = 0.309 first holds at N1 = 6.
        assert_eq!(grating_entry_m(18f64.to_radians().sin()), Some(12));
        assert_eq!(grating_entry_m(2.0 * 18f64.to_radians().sin()), Some(6));
        assert_eq!(grating_entry_m(0.0), None);
    }

    #[test]
    fn setups_are_shared_and_seeded() {
        let cfg = ExperimentConfig { trials: 4, ..ExperimentConfig::defaults(ExperimentKind::Fig3N1Sweep) };
        let a = trial_setups(&cfg, 3.58, &[]);
        assert_eq!(a, trial_setups(&cfg, 3.58, &[]));
        assert_ne!(a, trial_setups(&cfg, 3.58, &[1]));
        assert_eq!(a[0].angles.len(), 7);
        assert!(a.windows(2).all(|w| w[0].seed != w[1].seed));
    }

    #[test]
    fn custom_single_user_los() {
        let cfg = ExperimentConfig::parse(
            "experiment = custom\ngeometry = nested:3,4\ncompare = ula:7\nchannel = los\nangles_deg = 10\ntrials = 2",
        )
        .unwrap();
        let ExperimentResult::Custom { rows } = run(&cfg).unwrap() else { panic!() };
        let expect = (1.0 + 100.0 * 7.0f64).log2();
        assert!((rows[0].arm.mean_rate - expect).abs() < 1e-12);
        assert!((rows[1].arm.mean_rate - expect).abs() < 1e-12);
        assert_eq!(rows[0].diff.unwrap().mean, 0.0);
        let table = ExperimentResult::Custom { rows }.to_table(&cfg);
        assert!(!table.rows[0][table.column("paired_diff_mean").unwrap()].is_empty());
    }

    #[test]
    fn fig3_small_run_endpoints() {
        let cfg = ExperimentConfig::parse("experiment = fig3_n1_sweep\nm = 6\ntrials = 3\nsnapshots = 100\ngrid_size = 512")
            .unwrap();
        let ExperimentResult::Fig3 { rows, .. } = run(&cfg).unwrap() else { panic!() };
        assert_eq!(rows.len(), 7);
        for r in rows.iter().filter(|r| [0, 5, 6].contains(&r.n1)) {
            assert_eq!(r.nested.trial_rates.iter().sum::<f64>(), r.ula_mean_rate * 3.0);
            assert_eq!(r.diff.mean, 0.0);
        }
        assert!(rows.iter().all(|r| r.nested.rmse.is_some()));
    }
}
