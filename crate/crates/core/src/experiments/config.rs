//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::channel::OneRingParams;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::sensing::{DEFAULT_GRID, MIN_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Fig3N1Sweep,
    Fig4MSweep,
    Fig5SensingFirst,
    Custom,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig3N1Sweep => "fig3_n1_sweep",
            Self::Fig4MSweep => "fig4_m_sweep",
            Self::Fig5SensingFirst => "fig5_sensing_first",
            Self::Custom => "custom",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3_n1_sweep" => Ok(Self::Fig3N1Sweep),
            "fig4_m_sweep" => Ok(Self::Fig4MSweep),
            "fig5_sensing_first" => Ok(Self::Fig5SensingFirst),
            "custom" => Ok(Self::Custom),
            _ => Err(Error::config("experiment", format!("unknown experiment `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    Los,
    OneRing,
}

impl ChannelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Los => "los",
            Self::OneRing => "one_ring",
        }
    }
}

impl FromStr for ChannelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "los" => Ok(Self::Los),
            "one_ring" => Ok(Self::OneRing),
            _ => Err(Error::config("channel", format!("expected `los` or `one_ring`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Array sizes (the N1 sweep uses the first entry only).
    pub m: Vec<usize>,
    /// Inner-array sizes for the N1 sweep; `None` means `0..=M`.
    pub n1: Option<Vec<usize>>,
    /// Fixed inner size for the M sweeps and custom nested arms.
    pub nested_n1: Option<usize>,
    pub theta_max_deg: Vec<f64>,
    /// Total UEs.
    pub k: usize,
    /// Communication UEs; the remaining `k - k_c` are localization UEs.
    pub k_c: usize,
    pub receive_snr_db: f64,
    pub channel: ChannelMode,
    pub ring: OneRingParams<f64>,
    pub trials: usize,
    pub snapshots: usize,
    pub seed: u64,
    pub sensing: bool,
    pub grid_size: usize,
    /// Custom runs: geometry under test and optional paired baseline.
    pub geometry: Option<ArrayGeometry>,
    pub compare: Option<ArrayGeometry>,
    /// Custom runs: fixed UE angles instead of uniform draws.
    pub angles_deg: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `kind` before any key is applied.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            m: vec![16],
            n1: None,
            nested_n1: None,
            theta_max_deg: vec![3.58],
            k: 7,
            k_c: 6,
            receive_snr_db: 20.0,
            channel: ChannelMode::OneRing,
            ring: OneRingParams::default(),
            trials: 200,
            snapshots: 1000,
            seed: 1,
            sensing: true,
            grid_size: DEFAULT_GRID,
            geometry: None,
            compare: None,
            angles_deg: None,
            out: None,
            plot: None,
        };
        match kind {
            ExperimentKind::Fig3N1Sweep => base,
            ExperimentKind::Fig4MSweep => Self {
                m: (8..=32).step_by(4).collect(),
                theta_max_deg: vec![5.0, 10.0, 30.0],
                sensing: false,
                ..base
            },
            ExperimentKind::Fig5SensingFirst => Self {
                m: (8..=32).step_by(4).collect(),
                theta_max_deg: vec![18.0],
                ..base
            },
            ExperimentKind::Custom => Self { k: 1, k_c: 1, sensing: false, trials: 1, ..base },
        }
    }

    /// Parses the text of a config file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let kind = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| Error::config("experiment", "missing"))?
            .1
            .parse::<ExperimentKind>()?;
        let mut cfg = Self::defaults(kind);
        let mut seen = std::collections::BTreeSet::new();
        for (key, value) in &pairs {
            if !seen.insert(key.clone()) {
                return Err(Error::config(key.as_str(), "given more than once"));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "m" => self.m = parse_range(key, value)?,
            "n1" => self.n1 = Some(parse_range(key, value)?),
            "nested_n1" => self.nested_n1 = Some(parse_num(key, value)?),
            "theta_max_deg" => self.theta_max_deg = parse_list(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            "k_c" => self.k_c = parse_num(key, value)?,
            "receive_snr_db" => self.receive_snr_db = parse_num(key, value)?,
            "channel" => self.channel = value.parse()?,
            "num_paths" => self.ring.num_paths = parse_num(key, value)?,
            "ring_radius_m" => self.ring.ring_radius_m = parse_num(key, value)?,
            "center_range_m" => self.ring.center_range_m = parse_num(key, value)?,
            "rician_factor_db" => self.ring.rician_factor_db = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "snapshots" => self.snapshots = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "sensing" => self.sensing = parse_num(key, value)?,
            "grid_size" => self.grid_size = parse_num(key, value)?,
            "geometry" => self.geometry = Some(value.parse().map_err(|e: Error| Error::config(key, e.to_string()))?),
            "compare" => self.compare = Some(value.parse().map_err(|e: Error| Error::config(key, e.to_string()))?),
            "angles_deg" => self.angles_deg = Some(parse_list(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "plot" => self.plot = Some(PathBuf::from(value)),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if self.m.is_empty() || self.m.contains(&0) {
            return Err(Error::config("m", "needs at least one positive value"));
        }
        if self.theta_max_deg.is_empty() {
            return Err(Error::config("theta_max_deg", "empty"));
        }
        if let Some(t) = self.theta_max_deg.iter().find(|t| !(**t >= 0.0 && **t < 90.0)) {
            return Err(Error::config("theta_max_deg", format!("{t} outside [0, 90)")));
        }
        if self.k == 0 {
            return Err(Error::config("k", "must be >= 1"));
        }
        if self.k_c > self.k {
            return Err(Error::config("k_c", format!("{} exceeds k = {}", self.k_c, self.k)));
        }
        if self.k_c == 0 && !self.sensing {
            return Err(Error::config("k_c", "no communication UEs and sensing disabled"));
        }
        if self.sensing && self.k_c == self.k {
            return Err(Error::config("sensing", "enabled but k_c = k leaves no localization UE"));
        }
        if self.sensing && self.snapshots == 0 {
            return Err(Error::config("snapshots", "must be >= 1"));
        }
        if self.grid_size < MIN_GRID {
            return Err(Error::config("grid_size", format!("must be >= {MIN_GRID}")));
        }
        if !self.receive_snr_db.is_finite() {
            return Err(Error::config("receive_snr_db", "not finite"));
        }
        self.ring.validate().map_err(|e| Error::config("num_paths", e.to_string()))?;
        match self.experiment {
            ExperimentKind::Fig3N1Sweep => {
                let m = self.m[0];
                if let Some(bad) = self.n1.iter().flatten().find(|&&n| n > m) {
                    return Err(Error::config("n1", format!("{bad} exceeds m = {m}")));
                }
            }
            ExperimentKind::Fig4MSweep | ExperimentKind::Fig5SensingFirst => {
                if let Some(n1) = self.nested_n1 {
                    if let Some(m) = self.m.iter().find(|&&m| m <= n1) {
                        return Err(Error::config("nested_n1", format!("{n1} leaves no outer sensor at m = {m}")));
                    }
                } else if self.experiment == ExperimentKind::Fig5SensingFirst {
                    if let Some(m) = self.m.iter().find(|&&m| m % 2 == 1 || m < 2) {
                        return Err(Error::config("m", format!("sensing-first sweep needs even m, got {m}")));
                    }
                }
            }
            ExperimentKind::Custom => {
                if self.geometry.is_none() {
                    return Err(Error::config("geometry", "custom experiment needs a geometry"));
                }
                if let Some(a) = &self.angles_deg {
                    if a.len() != self.k {
                        return Err(Error::config("angles_deg", format!("{} angles for k = {}", a.len(), self.k)));
                    }
                    if let Some(bad) = a.iter().find(|t| !(t.abs() < 90.0)) {
                        return Err(Error::config("angles_deg", format!("{bad} outside (-90, 90)")));
                    }
                }
                if let (Some(g), Some(c)) = (&self.geometry, &self.compare) {
                    if g.len() != c.len() {
                        return Err(Error::config("compare", "baseline must have as many sensors as geometry"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Inner size used for the nested arm at array size `m`.
    pub fn nested_split(&self, m: usize) -> (usize, usize) {
        let n1 = self.nested_n1.unwrap_or(m / 2);
        (n1, m - n1)
    }

    /// Hex SHA-256 of the canonical rendering (output paths excluded).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn canonical(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let joinu = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("experiment={}", self.experiment.as_str()),
            format!("m={}", joinu(&self.m)),
            format!("n1={}", self.n1.as_deref().map(joinu).unwrap_or_default()),
            format!("nested_n1={:?}", self.nested_n1),
            format!("theta_max_deg={}", join(&self.theta_max_deg)),
            format!("k={}", self.k),
            format!("k_c={}", self.k_c),
            format!("receive_snr_db={:?}", self.receive_snr_db),
            format!("channel={}", self.channel.as_str()),
            format!(
                "ring={},{:?},{:?},{:?}",
                self.ring.num_paths, self.ring.ring_radius_m, self.ring.center_range_m, self.ring.rician_factor_db
            ),
            format!("trials={}", self.trials),
            format!("snapshots={}", self.snapshots),
            format!("seed={}", self.seed),
            format!("sensing={}", self.sensing),
            format!("grid_size={}", self.grid_size),
        ];
        lines.push(format!("geometry={}", self.geometry.as_ref().map(|g| g.to_string()).unwrap_or_default()));
        lines.push(format!("compare={}", self.compare.as_ref().map(|g| g.to_string()).unwrap_or_default()));
        lines.push(format!("angles_deg={}", self.angles_deg.as_deref().map(join).unwrap_or_default()));
        lines.join("\n")
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|t| parse_num(key, t.trim())).collect()
}

/// `a:b:step`, `a:b` (step 1), a comma list, or a single value.
pub fn parse_range(key: &str, value: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let out: Vec<usize> = match parts.as_slice() {
        [single] => parse_list(key, single)?,
        [a, b] | [a, b, _] => {
            let (a, b): (usize, usize) = (parse_num(key, a)?, parse_num(key, b)?);
            let step: usize = if parts.len() == 3 { parse_num(key, parts[2])? } else { 1 };
            if step == 0 {
                return Err(Error::config(key, "range step must be positive"));
            }
            (a..=b).step_by(step).collect()
        }
        _ => return Err(Error::config(key, format!("malformed range `{value}`"))),
    };
    if out.is_empty() {
        return Err(Error::config(key, format!("range `{value}` is empty")));
    }
    Ok(out)
}
