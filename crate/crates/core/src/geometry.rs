//! Linear array geometries on the half-wavelength grid and their difference co-arrays.
//!
//! Positions are integers in units of `d0 = lambda / 2`, so every steering
//! phase is `pi * (p - 1) * sin(theta)` and no wavelength enters the math.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeometryKind {
    /// Two-level nested array. `degenerate_ula` is set when the positions
    /// coincide with a compact ULA.
    Nested { n1: usize, n2: usize, degenerate_ula: bool },
    Ula { m: usize },
    Custom,
}

/// Sorted, distinct, positive antenna positions plus how they were built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    positions: Vec<usize>,
    kind: GeometryKind,
}

impl ArrayGeometry {
    /// Nested array `{1..n1} ∪ {k(n1+1) : k = 1..n2}`.
    pub fn nested(n1: usize, n2: usize) -> Result<Self> {
        if n1 + n2 == 0 {
            return Err(Error::InvalidConfiguration(
                "nested array needs n1 + n2 >= 1".into(),
            ));
        }
        let mut positions: Vec<usize> = (1..=n1).collect();
        positions.extend((1..=n2).map(|k| k * (n1 + 1)));
        let m = positions.len();
        let degenerate_ula = positions.iter().enumerate().all(|(i, &p)| p == i + 1);
        debug_assert_eq!(m, n1 + n2);
        Ok(Self { positions, kind: GeometryKind::Nested { n1, n2, degenerate_ula } })
    }

    pub fn ula(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfiguration("ULA needs m >= 1".into()));
        }
        Ok(Self { positions: (1..=m).collect(), kind: GeometryKind::Ula { m } })
    }

    /// Arbitrary grid positions; they must be positive, distinct and increasing.
    pub fn custom(positions: Vec<usize>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidConfiguration("custom geometry is empty".into()));
        }
        if positions[0] == 0 {
            return Err(Error::InvalidConfiguration("positions must be positive".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfiguration(
                "positions must be strictly increasing".into(),
            ));
        }
        Ok(Self { positions, kind: GeometryKind::Custom })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Number of physical antennas `M`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Largest grid position (the aperture in `d0` units, counted from the origin).
    pub fn max_position(&self) -> usize {
        *self.positions.last().expect("geometry is never empty")
    }

    /// True when the positions are exactly `1..=M`.
    pub fn is_compact_ula(&self) -> bool {
        self.positions.iter().enumerate().all(|(i, &p)| p == i + 1)
    }

    /// `(n1, n2)` when this is a nested array that is not ULA-equivalent.
    pub fn proper_nested(&self) -> Option<(usize, usize)> {
        match self.kind {
            GeometryKind::Nested { n1, n2, degenerate_ula: false } => Some((n1, n2)),
            _ => None,
        }
    }

    pub fn difference_coarray(&self) -> CoArray {
        CoArray::from_positions(&self.positions)
    }

    /// Steering vector with entries `exp(j pi (p_m - 1) sin(angle))`.
    pub fn steering_vector<T: Real>(&self, angle: T) -> Result<Vec<Complex<T>>> {
        let half_pi = T::FRAC_PI_2();
        if !(angle > -half_pi && angle < half_pi) {
            return Err(Error::AngleDomain(angle.as_f64()));
        }
        Ok(self.steering_vector_sin(angle.sin()))
    }

    /// Steering vector parameterised directly by `u = sin(theta)`.
    pub fn steering_vector_sin<T: Real>(&self, u: T) -> Vec<Complex<T>> {
        let pi = T::PI();
        self.positions
            .iter()
            .map(|&p| Complex::from_polar(T::one(), pi * T::from_count(p - 1) * u))
            .collect()
    }
}

impl fmt::Display for ArrayGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeometryKind::Nested { n1, n2, .. } => write!(f, "nested:{n1},{n2}"),
            GeometryKind::Ula { m } => write!(f, "ula:{m}"),
            GeometryKind::Custom => {
                let list: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
                write!(f, "custom:{}", list.join(","))
            }
        }
    }
}

impl FromStr for ArrayGeometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("geometry `{s}` lacks a `kind:` prefix")))?;
        let numbers = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad integer `{t}` in geometry `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match (tag.trim(), numbers.as_slice()) {
            ("nested", [n1, n2]) => Self::nested(*n1, *n2),
            ("ula", [m]) => Self::ula(*m),
            ("custom", _) => Self::custom(numbers),
            _ => Err(Error::Parse(format!("unrecognised geometry `{s}`"))),
        }
    }
}

/// Non-negative difference lags of an array with every contributing physical pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoArray {
    lags: Vec<usize>,
    pair_map: BTreeMap<usize, Vec<(usize, usize)>>,
    contiguous_extent: usize,
    num_sensors: usize,
}

impl CoArray {
    fn from_positions(positions: &[usize]) -> Self {
        let mut pair_map: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, &pi) in positions.iter().enumerate() {
            for (j, &pj) in positions.iter().enumerate() {
                if pi >= pj {
                    pair_map.entry(pi - pj).or_default().push((i, j));
                }
            }
        }
        let lags: Vec<usize> = pair_map.keys().copied().collect();
        let contiguous_extent = lags.iter().enumerate().take_while(|(i, &l)| *i == l).count();
        Self { lags, pair_map, contiguous_extent, num_sensors: positions.len() }
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    /// Physical index pairs `(i, j)` with `p_i - p_j = lag`.
    pub fn pairs(&self, lag: usize) -> &[(usize, usize)] {
        self.pair_map.get(&lag).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Largest `L` with `{0, .., L-1}` all present.
    pub fn contiguous_extent(&self) -> usize {
        self.contiguous_extent
    }

    /// Element count of the contiguous virtual ULA, `2L - 1`.
    pub fn virtual_ula_len(&self) -> usize {
        2 * self.contiguous_extent - 1
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    /// All signed lags, ascending.
    pub fn signed_lags(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.lags.iter().rev().map(|&l| -(l as i64)).collect();
        out.extend(self.lags.iter().skip(1).map(|&l| l as i64));
        out
    }
}
