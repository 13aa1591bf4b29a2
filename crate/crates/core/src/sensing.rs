//! Localization pipeline: snapshot simulation, genie-aided removal of the
//! communication users, co-array virtual signal, spatial smoothing and a
//! subspace spectral search for the localization-user DoAs.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelRealization;
use crate::comm::{UeRole, UplinkScenario};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, CoArray};
use crate::C64;

/// Default number of points on the `sin(theta)` search grid.
pub const DEFAULT_GRID: usize = 4096;
/// Smallest accepted search grid.
pub const MIN_GRID: usize = 180;

/// One uplink transmitter as seen by the array.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmitter {
    pub role: UeRole,
    /// LoS angle, radians. For localization users this is the DoA to estimate.
    pub angle: f64,
    /// Channel scaled by `sqrt(receive_snr)`.
    pub channel: Vec<C64>,
}

/// Pairs each user of `scenario` with its channel realization.
pub fn transmitters(scenario: &UplinkScenario<f64>, channels: &[ChannelRealization<f64>]) -> Result<Vec<Transmitter>> {
    if channels.len() != scenario.ues.len() {
        return Err(Error::DimensionMismatch { expected: scenario.ues.len(), got: channels.len() });
    }
    Ok(scenario
        .ues
        .iter()
        .zip(channels)
        .map(|(ue, ch)| Transmitter { role: ue.role, angle: ue.angle, channel: ch.h.clone() })
        .collect())
}

/// Received samples (`M x T`) with the symbols and channels that produced them.
#[derive(Debug, Clone)]
pub struct SnapshotBatch {
    pub samples: DMatrix<C64>,
    /// `K x T` unit-power symbols, one row per transmitter.
    pub symbols: DMatrix<C64>,
    pub transmitters: Vec<Transmitter>,
}

impl SnapshotBatch {
    /// Angles of the localization users, ascending.
    pub fn truth(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self
            .transmitters
            .iter()
            .filter(|u| u.role == UeRole::Loc)
            .map(|u| u.angle)
            .collect();
        t.sort_by(f64::total_cmp);
        t
    }

    pub fn num_snapshots(&self) -> usize {
        self.samples.ncols()
    }
}

fn qpsk(rng: &mut ChaCha8Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = if rng.random::<bool>() { s } else { -s };
    let im = if rng.random::<bool>() { s } else { -s };
    C64::new(re, im)
}

/// Draws `snapshots` columns of `y = sum_i h_i x_i + n` with QPSK symbols and
/// unit-variance circular Gaussian noise.
pub fn simulate_snapshots(
    num_antennas: usize,
    transmitters: &[Transmitter],
    snapshots: usize,
    seed: u64,
) -> Result<SnapshotBatch> {
    if snapshots == 0 {
        return Err(Error::InvalidConfiguration("snapshot count must be >= 1".into()));
    }
    if let Some(bad) = transmitters.iter().find(|u| u.channel.len() != num_antennas) {
        return Err(Error::DimensionMismatch { expected: num_antennas, got: bad.channel.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = transmitters.len();
    let mut symbols = DMatrix::<C64>::zeros(k, snapshots);
    let mut samples = DMatrix::<C64>::zeros(num_antennas, snapshots);
    let noise_scale = std::f64::consts::FRAC_1_SQRT_2;
    for t in 0..snapshots {
        for (i, u) in transmitters.iter().enumerate() {
            let x = qpsk(&mut rng);
            symbols[(i, t)] = x;
            for (m, h) in u.channel.iter().enumerate() {
                samples[(m, t)] += h * x;
            }
        }
        for m in 0..num_antennas {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            samples[(m, t)] += C64::new(re, im) * noise_scale;
        }
    }
    Ok(SnapshotBatch { samples, symbols, transmitters: transmitters.to_vec() })
}

/// Subtracts every communication user's contribution, assuming its symbols
/// and channel are known, and drops those users from the batch.
pub fn cancel_comm(batch: &SnapshotBatch) -> SnapshotBatch {
    let mut samples = batch.samples.clone();
    let mut keep = Vec::new();
    for (i, u) in batch.transmitters.iter().enumerate() {
        if u.role == UeRole::Comm {
            for t in 0..samples.ncols() {
                let x = batch.symbols[(i, t)];
                for (m, h) in u.channel.iter().enumerate() {
                    samples[(m, t)] -= h * x;
                }
            }
        } else {
            keep.push(i);
        }
    }
    let symbols = batch.symbols.select_rows(keep.iter());
    let transmitters = keep.iter().map(|&i| batch.transmitters[i].clone()).collect();
    SnapshotBatch { samples, symbols, transmitters }
}

/// `(1/T) sum_t y_t y_t^H`.
pub fn sample_covariance(samples: &DMatrix<C64>) -> DMatrix<C64> {
    let t = samples.ncols() as f64;
    let mut r = samples * samples.adjoint();
    r /= C64::new(t, 0.0);
    r
}

/// `A diag(powers) A^H + noise I` for LoS sources at `angles`.
pub fn exact_covariance(geom: &ArrayGeometry, angles: &[f64], powers: &[f64], noise: f64) -> Result<DMatrix<C64>> {
    let m = geom.len();
    let mut r = DMatrix::<C64>::identity(m, m) * C64::new(noise, 0.0);
    for (&theta, &p) in angles.iter().zip(powers) {
        let a = nalgebra::DVector::from_vec(geom.steering_vector(theta)?);
        r += &a * a.adjoint() * C64::new(p, 0.0);
    }
    Ok(r)
}

/// Co-array samples over the contiguous lags `-(L-1) ..= L-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualSignal {
    /// Value at lag `l` is stored at index `l + L - 1`.
    pub values: Vec<C64>,
    /// Contiguous extent `L`.
    pub extent: usize,
    /// Number of physical pairs averaged for each lag `0..L`.
    pub counts: Vec<usize>,
}

impl VirtualSignal {
    pub fn at(&self, lag: i64) -> C64 {
        self.values[(lag + self.extent as i64 - 1) as usize]
    }
}

/// Averages `R[i, j]` over every pair with `p_i - p_j = l` and keeps the
/// contiguous lag segment, sorted by lag.
pub fn coarray_signal(r: &DMatrix<C64>, coarray: &CoArray) -> Result<VirtualSignal> {
    let m = coarray.num_sensors();
    if r.nrows() != m || r.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: r.nrows() });
    }
    let ext = coarray.contiguous_extent();
    let mut values = vec![C64::new(0.0, 0.0); 2 * ext - 1];
    let mut counts = Vec::with_capacity(ext);
    for lag in 0..ext {
        let pairs = coarray.pairs(lag);
        let sum: C64 = pairs.iter().map(|&(i, j)| r[(i, j)]).sum();
        let pos = sum / pairs.len() as f64;
        let neg: C64 = pairs.iter().map(|&(i, j)| r[(j, i)]).sum::<C64>() / pairs.len() as f64;
        values[ext - 1 + lag] = pos;
        values[ext - 1 - lag] = if lag == 0 { pos } else { neg };
        counts.push(pairs.len());
    }
    Ok(VirtualSignal { values, extent: ext, counts })
}

/// Averages the outer products of the `L` length-`L` sub-vectors of `z`.
pub fn spatial_smoothing(z: &VirtualSignal) -> Result<DMatrix<C64>> {
    let l = z.extent;
    if l == 0 || z.values.len() != 2 * l - 1 {
        return Err(Error::NonContiguous);
    }
    let v = &z.values;
    let mut out = DMatrix::<C64>::zeros(l, l);
    for row in 0..l {
        for col in 0..=row {
            let s: C64 = (0..l).map(|i| v[i + row] * v[i + col].conj()).sum::<C64>() / l as f64;
            out[(row, col)] = s;
            out[(col, row)] = s.conj();
        }
    }
    Ok(out)
}

/// Estimated DoAs with the pseudo-spectrum they were read from.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    /// Radians, ascending.
    pub angles: Vec<f64>,
    /// `(angle, pseudo-spectrum)` over the search grid.
    pub spectrum: Vec<(f64, f64)>,
    pub num_sources: usize,
}

/// Eigenvalues (descending) and matching eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(r: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(r.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Subspace search over a uniform `sin(theta)` grid of `grid_size` points.
///
/// The pseudo-spectrum is `1 / ||E_n^H a(u)||^2` with the virtual-ULA steering
/// `a(u)_m = exp(j pi m u)`. The strongest `num_sources` local maxima are kept
/// and each is refined by a parabola through the null spectrum at the peak
/// and its two grid neighbours.
pub fn doa_music(r_ss: &DMatrix<C64>, num_sources: usize, grid_size: usize) -> Result<DoaEstimate> {
    let l = r_ss.nrows();
    if grid_size < MIN_GRID {
        return Err(Error::InvalidConfiguration(format!("grid size {grid_size} < {MIN_GRID}")));
    }
    if num_sources >= l {
        return Err(Error::UnderResolution { found: Vec::new(), requested: num_sources });
    }
    let (_, vectors) = hermitian_eigen(r_ss);
    // Project on whichever subspace is smaller.
    let use_noise = l - num_sources <= num_sources;
    let basis = if use_noise {
        vectors.columns(num_sources, l - num_sources).into_owned()
    } else {
        vectors.columns(0, num_sources).into_owned()
    };
    let step = 2.0 / grid_size as f64;
    let null_at = |u: f64| -> f64 {
        let w = C64::from_polar(1.0, std::f64::consts::PI * u);
        let a: Vec<C64> = std::iter::successors(Some(C64::new(1.0, 0.0)), |z| Some(z * w))
            .take(l)
            .collect();
        let proj: f64 = basis
            .column_iter()
            .map(|e| e.iter().zip(&a).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr())
            .sum();
        if use_noise {
            proj
        } else {
            (l as f64 - proj).max(0.0)
        }
    };
    let grid: Vec<f64> = (0..grid_size).map(|i| -1.0 + step * i as f64).collect();
    let null: Vec<f64> = grid.iter().map(|&u| null_at(u)).collect();
    let floor = f64::MIN_POSITIVE;
    let spectrum: Vec<(f64, f64)> = grid
        .iter()
        .zip(&null)
        .map(|(&u, &d)| (u.asin(), 1.0 / d.max(floor)))
        .collect();

    let mut peaks: Vec<usize> = (1..grid_size - 1)
        .filter(|&i| null[i] < null[i - 1] && null[i] <= null[i + 1])
        .collect();
    peaks.sort_by(|&a, &b| null[a].total_cmp(&null[b]).then(a.cmp(&b)));
    peaks.truncate(num_sources);

    let mut angles: Vec<f64> = peaks
        .iter()
        .map(|&i| {
            let (dm, d0, dp) = (null[i - 1], null[i], null[i + 1]);
            let curv = dm - 2.0 * d0 + dp;
            let offset = if curv > 0.0 { (0.5 * (dm - dp) / curv).clamp(-0.5, 0.5) } else { 0.0 };
            (grid[i] + offset * step).clamp(-1.0, 1.0).asin()
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    if angles.len() < num_sources {
        return Err(Error::UnderResolution { found: angles, requested: num_sources });
    }
    Ok(DoaEstimate { angles, spectrum, num_sources })
}

/// Covariance → co-array → smoothing → subspace search.
pub fn estimate_doa(
    r: &DMatrix<C64>,
    coarray: &CoArray,
    num_sources: usize,
    grid_size: usize,
) -> Result<DoaEstimate> {
    let z = coarray_signal(r, coarray)?;
    let r_ss = spatial_smoothing(&z)?;
    doa_music(&r_ss, num_sources, grid_size)
}

/// Estimated and true angles for one trial; `estimate` is `None` when the
/// estimator failed or returned the wrong number of angles.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub truth: Vec<f64>,
    pub estimate: Option<Vec<f64>>,
}

impl TrialOutcome {
    pub fn new(truth: Vec<f64>, estimate: Option<Vec<f64>>) -> Self {
        let estimate = estimate.filter(|e| e.len() == truth.len());
        Self { truth, estimate }
    }

    /// Sum of squared errors in degrees², pairing sorted estimates with sorted truth.
    fn squared_error_deg(&self) -> Option<(f64, usize)> {
        let est = self.estimate.as_ref()?;
        let mut e = est.clone();
        let mut t = self.truth.clone();
        e.sort_by(f64::total_cmp);
        t.sort_by(f64::total_cmp);
        let sse = e.iter().zip(&t).map(|(a, b)| (a - b).to_degrees().powi(2)).sum();
        Some((sse, t.len()))
    }

    /// Per-trial RMSE in degrees.
    pub fn rmse_deg(&self) -> Option<f64> {
        self.squared_error_deg().map(|(s, n)| if n == 0 { 0.0 } else { (s / n as f64).sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseSummary {
    /// NaN when every trial failed.
    pub rmse_deg: f64,
    pub trials: usize,
    pub failed: usize,
}

impl RmseSummary {
    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failed as f64 / self.trials as f64
        }
    }
}

/// Root mean squared angular error over all sources of all successful trials.
pub fn rmse(outcomes: &[TrialOutcome]) -> RmseSummary {
    let (mut sse, mut n, mut failed) = (0.0, 0usize, 0usize);
    for o in outcomes {
        match o.squared_error_deg() {
            Some((s, k)) => {
                sse += s;
                n += k;
            }
            None => failed += 1,
        }
    }
    let rmse_deg = if n == 0 {
        if outcomes.len() > failed { 0.0 } else { f64::NAN }
    } else {
        (sse / n as f64).sqrt()
    };
    RmseSummary { rmse_deg, trials: outcomes.len(), failed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::los_channel;

    fn loc(angle: f64, geom: &ArrayGeometry, snr: f64) -> Transmitter {
        let h = los_channel(geom, angle, C64::new(snr.sqrt(), 0.0)).unwrap().h;
        Transmitter { role: UeRole::Loc, angle, channel: h }
    }

    fn comm(angle: f64, geom: &ArrayGeometry, snr: f64) -> Transmitter {
        Transmitter { role: UeRole::Comm, ..loc(angle, geom, snr) }
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn noise_only_covariance_tends_to_identity() {
        let b = simulate_snapshots(4, &[], 20_000, 1).unwrap();
        let r = sample_covariance(&b.samples);
        let err = max_abs(&(r - DMatrix::<C64>::identity(4, 4)));
        assert!(err < 0.03, "{err}");
    }

    #[test]
    fn covariance_single_snapshot_all_ones() {
        let y = DMatrix::from_element(3, 1, C64::new(1.0, 0.0));
        let r = sample_covariance(&y);
        assert!(r.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn covariance_is_hermitian() {
        let g = ArrayGeometry::nested(2, 3).unwrap();
        let b = simulate_snapshots(5, &[loc(0.3, &g, 10.0)], 64, 4).unwrap();
        let r = sample_covariance(&b.samples);
        assert!(max_abs(&(&r - r.adjoint())) < 1e-14);
    }

    #[test]
    fn covariance_diagonal_expectation() {
        let g = ArrayGeometry::ula(4).unwrap();
        let b = simulate_snapshots(4, &[loc(0.0, &g, 100.0)], 100_000, 8).unwrap();
        let r = sample_covariance(&b.samples);
        for i in 0..4 {
            assert!((r[(i, i)].re - 101.0).abs() / 101.0 < 0.03);
        }
    }

    #[test]
    fn column_power_expectation() {
        let g = ArrayGeometry::nested(3, 3).unwrap();
        let us = [loc(0.2, &g, 10.0), comm(-0.4, &g, 5.0)];
        let b = simulate_snapshots(6, &us, 10_000, 2).unwrap();
        let p = b.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / (6.0 * 10_000.0);
        assert!((p - 16.0).abs() / 16.0 < 0.03, "{p}");
    }

    #[test]
    fn noiseless_single_user_columns_follow_steering() {
        let g = ArrayGeometry::nested(2, 2).unwrap();
        let u = loc(0.5, &g, 1.0);
        let b = simulate_snapshots(4, std::slice::from_ref(&u), 10, 3).unwrap();
        // Remove the noise using the recorded symbols to isolate the signal part.
        let mut sig = DMatrix::<C64>::zeros(4, 10);
        for t in 0..10 {
            for m in 0..4 {
                sig[(m, t)] = u.channel[m] * b.symbols[(0, t)];
            }
            let ratio = sig[(3, t)] / sig[(0, t)];
            assert!((ratio - u.channel[3] / u.channel[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn cancellation() {
        let g = ArrayGeometry::nested(3, 3).unwrap();
        let b = simulate_snapshots(6, &[loc(0.1, &g, 1.0)], 16, 9).unwrap();
        let c = cancel_comm(&b);
        assert_eq!(c.samples, b.samples);

        // Comm-only batch: the residual is exactly the noise.
        let noise = simulate_snapshots(6, &[], 16, 11).unwrap();
        let b = simulate_snapshots(6, &[comm(0.1, &g, 50.0), comm(-0.5, &g, 20.0)], 16, 11).unwrap();
        let c = cancel_comm(&b);
        assert!(c.transmitters.is_empty());
        // Same seed but different symbol draws interleaved, so compare energy instead.
        let e_res: f64 = c.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / 96.0;
        let e_noise: f64 = noise.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / 96.0;
        assert!(e_res < 3.0 && e_noise < 3.0);
    }

    #[test]
    fn cancellation_is_exact_without_noise() {
        let g = ArrayGeometry::ula(4).unwrap();
        let us = vec![comm(0.3, &g, 4.0), loc(-0.2, &g, 2.0)];
        let b = simulate_snapshots(4, &us, 8, 5).unwrap();
        let c = cancel_comm(&b);
        let mut expected = b.samples.clone();
        for t in 0..8 {
            for m in 0..4 {
                expected[(m, t)] -= us[0].channel[m] * b.symbols[(0, t)];
            }
        }
        assert!(max_abs(&(&c.samples - expected)) < 1e-12);
        assert_eq!(c.truth(), vec![-0.2]);
    }

    #[test]
    fn residual_covariance_limit() {
        let g = ArrayGeometry::nested(2, 3).unwrap();
        let us = vec![comm(0.4, &g, 30.0), loc(-0.2, &g, 10.0)];
        let b = simulate_snapshots(5, &us, 60_000, 21).unwrap();
        let r = sample_covariance(&cancel_comm(&b).samples);
        let exact = exact_covariance(&g, &[-0.2], &[10.0], 1.0).unwrap();
        assert!(max_abs(&(r - exact)) < 0.35);
    }

    #[test]
    fn identity_maps_to_lag_zero() {
        let c = ArrayGeometry::nested(3, 3).unwrap().difference_coarray();
        let z = coarray_signal(&DMatrix::identity(6, 6), &c).unwrap();
        assert_eq!(z.extent, 12);
        for l in -11..=11i64 {
            let expect = if l == 0 { 1.0 } else { 0.0 };
            assert!((z.at(l) - C64::new(expect, 0.0)).norm() < 1e-15);
        }
        assert_eq!(z.counts[0], 6);
    }

    #[test]
    fn exact_single_source_virtual_signal() {
        let g = ArrayGeometry::nested(3, 4).unwrap();
        let phi: f64 = 0.37;
        let r = exact_covariance(&g, &[phi], &[2.0], 0.0).unwrap();
        let z = coarray_signal(&r, &g.difference_coarray()).unwrap();
        for l in -(z.extent as i64 - 1)..z.extent as i64 {
            let expect = C64::from_polar(2.0, std::f64::consts::PI * l as f64 * phi.sin());
            assert!((z.at(l) - expect).norm() < 1e-12);
            assert!((z.at(-l) - z.at(l).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn coarray_dimension_check() {
        let c = ArrayGeometry::nested(3, 3).unwrap().difference_coarray();
        assert!(matches!(coarray_signal(&DMatrix::identity(4, 4), &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn smoothing_scalar_case() {
        let z = VirtualSignal { values: vec![C64::new(3.0, 4.0)], extent: 1, counts: vec![1] };
        let r = spatial_smoothing(&z).unwrap();
        assert!((r[(0, 0)].re - 25.0).abs() < 1e-12);
        let bad = VirtualSignal { values: vec![C64::new(1.0, 0.0); 4], extent: 2, counts: vec![1, 1] };
        assert_eq!(spatial_smoothing(&bad), Err(Error::NonContiguous));
    }

    #[test]
    fn smoothing_rank_one_single_source() {
        let g = ArrayGeometry::nested(3, 3).unwrap();
        let r = exact_covariance(&g, &[0.2], &[1.0], 0.0).unwrap();
        let z = coarray_signal(&r, &g.difference_coarray()).unwrap();
        let (vals, _) = hermitian_eigen(&spatial_smoothing(&z).unwrap());
        assert!(vals[0] / vals[1].abs().max(1e-300) > 1e6);
    }

    #[test]
    fn smoothing_rank_equals_source_count() {
        let g = ArrayGeometry::nested(3, 3).unwrap();
        let angles: Vec<f64> = [-50.0, -25.0, 0.0, 20.0, 45.0].iter().map(|&d| deg(d)).collect();
        let r = exact_covariance(&g, &angles, &[1.0; 5], 1.0).unwrap();
        let z = coarray_signal(&r, &g.difference_coarray()).unwrap();
        let rss = spatial_smoothing(&z).unwrap();
        let (vals, _) = hermitian_eigen(&rss);
        // Noise floor of (A P A^H + I)^2 / L is 1 / L.
        let floor = 1.0 / 12.0;
        let above = vals.iter().filter(|&&v| v > floor * (1.0 + 1e-6)).count();
        assert_eq!(above, 5);
        assert!(vals.iter().all(|&v| v >= -1e-10 * vals[0]));
    }

    #[test]
    fn music_single_source_broadside() {
        let g = ArrayGeometry::nested(2, 2).unwrap();
        let r = exact_covariance(&g, &[0.0], &[1.0], 1.0).unwrap();
        let est = estimate_doa(&r, &g.difference_coarray(), 1, DEFAULT_GRID).unwrap();
        assert!(est.angles[0].abs().to_degrees() < 0.03);
        assert_eq!(est.spectrum.len(), DEFAULT_GRID);
    }

    #[test]
    fn music_exact_covariance_max_sources() {
        for (n1, n2) in [(3usize, 3usize), (4, 4)] {
            let g = ArrayGeometry::nested(n1, n2).unwrap();
            let c = g.difference_coarray();
            let d = c.contiguous_extent() - 1;
            let angles: Vec<f64> = (0..d).map(|i| deg(-60.0 + 120.0 * i as f64 / (d - 1) as f64)).collect();
            let r = exact_covariance(&g, &angles, &vec![1.0; d], 1.0).unwrap();
            let est = estimate_doa(&r, &c, d, DEFAULT_GRID).unwrap();
            for (e, t) in est.angles.iter().zip(&angles) {
                assert!((e - t).abs().to_degrees() < 0.05, "({n1},{n2}) {e} vs {t}");
            }
        }
    }

    #[test]
    fn music_refuses_too_many_sources() {
        let g = ArrayGeometry::ula(6).unwrap();
        let r = exact_covariance(&g, &[0.0], &[1.0], 1.0).unwrap();
        let err = estimate_doa(&r, &g.difference_coarray(), 9, DEFAULT_GRID).unwrap_err();
        assert!(matches!(err, Error::UnderResolution { requested: 9, .. }));
        assert!(doa_music(&DMatrix::identity(4, 4), 1, 100).is_err());
    }

    #[test]
    fn rmse_cases() {
        let truth = vec![deg(-10.0), deg(20.0)];
        let perfect = TrialOutcome::new(truth.clone(), Some(truth.clone()));
        assert_eq!(rmse(&[perfect.clone()]).rmse_deg, 0.0);
        let biased = TrialOutcome::new(truth.clone(), Some(truth.iter().map(|t| t + deg(1.0)).collect()));
        assert!((rmse(&[biased.clone()]).rmse_deg - 1.0).abs() < 1e-12);
        let failed = TrialOutcome::new(truth.clone(), Some(vec![0.0]));
        let s = rmse(&[biased, failed.clone()]);
        assert!((s.rmse_deg - 1.0).abs() < 1e-12);
        assert_eq!((s.failed, s.trials), (1, 2));
        assert_eq!(s.failure_rate(), 0.5);
        assert!(rmse(&[failed]).rmse_deg.is_nan());
        // Estimates are matched in sorted order.
        let swapped = TrialOutcome::new(truth.clone(), Some(vec![truth[1], truth[0]]));
        assert_eq!(swapped.rmse_deg(), Some(0.0));
    }

    #[test]
    fn high_snr_single_source_rmse_is_small() {
        let g = ArrayGeometry::nested(4, 4).unwrap();
        let c = g.difference_coarray();
        let truth = deg(12.0);
        let b = simulate_snapshots(8, &[loc(truth, &g, 1000.0)], 4000, 17).unwrap();
        let est = estimate_doa(&sample_covariance(&b.samples), &c, 1, DEFAULT_GRID).unwrap();
        let o = TrialOutcome::new(vec![truth], Some(est.angles));
        // Grid spacing in degrees near 12 degrees.
        let grid_deg = (2.0 / DEFAULT_GRID as f64 / truth.cos()).to_degrees();
        assert!(o.rmse_deg().unwrap() < grid_deg);
    }
}
