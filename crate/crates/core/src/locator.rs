//! Range-angle estimation with 2D-MUSIC and relay-geometry localization.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{irs_position, target_position, Point2, RadarSite};
use crate::signal::{beat_frequency, ChirpConfig, IqFrame};

/// Receive data indexed `[rx][chirp][sample]`, half-wavelength element pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct RxCube {
    data: Vec<Vec<Vec<Complex64>>>,
}

impl RxCube {
    /// From per-chirp frame sets as produced by the array synthesiser
    /// (`chirps[c][rx]`).
    pub fn from_chirps(chirps: &[Vec<IqFrame>]) -> Result<Self> {
        let rx = chirps.first().map_or(0, Vec::len);
        let n = chirps.first().and_then(|c| c.first()).map_or(0, IqFrame::len);
        if rx == 0 || n == 0 {
            return Err(Error::InsufficientSnapshots("empty cube".into()));
        }
        let mut data = vec![Vec::with_capacity(chirps.len()); rx];
        for c in chirps {
            if c.len() != rx || c.iter().any(|f| f.len() != n) {
                return Err(Error::InvalidParameter("ragged cube".into()));
            }
            for (m, f) in c.iter().enumerate() {
                data[m].push(f.samples.clone());
            }
        }
        Ok(Self { data })
    }

    pub fn rx_count(&self) -> usize {
        self.data.len()
    }

    pub fn chirp_count(&self) -> usize {
        self.data[0].len()
    }

    pub fn samples_per_chirp(&self) -> usize {
        self.data[0][0].len()
    }

    pub fn get(&self, rx: usize, chirp: usize, sample: usize) -> Complex64 {
        self.data[rx][chirp][sample]
    }

    /// Multiplies every sample by `k`.
    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            data: self
                .data
                .iter()
                .map(|r| r.iter().map(|c| c.iter().map(|s| s * k).collect()).collect())
                .collect(),
        }
    }
}

/// Search grid; range is one-way-equivalent (total path / 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MusicGrid {
    pub range_min: f64,
    pub range_max: f64,
    pub range_step: f64,
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    pub angle_step_deg: f64,
}

impl Default for MusicGrid {
    fn default() -> Self {
        Self {
            range_min: 0.3,
            range_max: 6.0,
            range_step: 0.02,
            angle_min_deg: -60.0,
            angle_max_deg: 60.0,
            angle_step_deg: 0.5,
        }
    }
}

impl MusicGrid {
    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| lo + i as f64 * step).collect()
    }

    pub fn ranges(&self) -> Vec<f64> {
        Self::axis(self.range_min, self.range_max, self.range_step)
    }

    pub fn angles_deg(&self) -> Vec<f64> {
        Self::axis(self.angle_min_deg, self.angle_max_deg, self.angle_step_deg)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.range_step > 0.0
            && self.angle_step_deg > 0.0
            && self.range_max >= self.range_min
            && self.angle_max_deg >= self.angle_min_deg
            && self.angle_min_deg >= -90.0
            && self.angle_max_deg <= 90.0;
        if !ok {
            return Err(Error::InvalidParameter(format!("bad MUSIC grid {self:?}")));
        }
        Ok(())
    }
}

/// Spatial-smoothing subarray: `rx` elements by `samples` fast-time samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Smoothing {
    pub rx: usize,
    pub samples: usize,
}

impl Default for Smoothing {
    fn default() -> Self {
        Self { rx: 3, samples: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MusicPeak {
    /// One-way-equivalent range, m.
    pub range: f64,
    /// Angle of arrival from boresight, rad.
    pub aoa: f64,
    /// Pseudo-spectrum level, dB.
    pub power: f64,
}

/// Full pseudo-spectrum on a grid, `values[range][angle]` in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct MusicSpectrum {
    pub ranges: Vec<f64>,
    pub angles_deg: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Per-sample noise power, mean of the noise-subspace eigenvalues.
    pub noise_power: f64,
}

impl MusicSpectrum {
    /// Local maxima over the 8-neighbourhood, strongest first.
    pub fn peaks(&self) -> Vec<MusicPeak> {
        let nr = self.ranges.len();
        let na = self.angles_deg.len();
        let mut out = Vec::new();
        for i in 0..nr {
            for j in 0..na {
                let v = self.values[i][j];
                let mut is_max = true;
                'n: for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii < 0 || jj < 0 || ii >= nr as i64 || jj >= na as i64 {
                            continue;
                        }
                        let w = self.values[ii as usize][jj as usize];
                        // Ties resolve to the earliest cell.
                        if w > v || (w == v && (ii, jj) < (i as i64, j as i64)) {
                            is_max = false;
                            break 'n;
                        }
                    }
                }
                if is_max {
                    out.push(MusicPeak { range: self.ranges[i], aoa: self.angles_deg[j].to_radians(), power: v });
                }
            }
        }
        out.sort_by(|a, b| b.power.total_cmp(&a.power).then(a.range.total_cmp(&b.range)));
        out
    }
}

/// Forward-backward smoothed sample covariance over all subarray positions
/// and chirps.
fn smoothed_covariance(cube: &RxCube, sm: Smoothing) -> Result<DMatrix<Complex64>> {
    let (rx, n) = (cube.rx_count(), cube.samples_per_chirp());
    if sm.rx == 0 || sm.samples == 0 || sm.rx > rx || sm.samples > n {
        return Err(Error::InvalidParameter(format!("smoothing {sm:?} exceeds cube {rx}x{n}")));
    }
    let m = sm.rx * sm.samples;
    let mut r = DMatrix::<Complex64>::zeros(m, m);
    let mut count = 0usize;
    let mut x = DVector::<Complex64>::zeros(m);
    for c in 0..cube.chirp_count() {
        for e0 in 0..=rx - sm.rx {
            for s0 in 0..=n - sm.samples {
                for a in 0..sm.rx {
                    for b in 0..sm.samples {
                        x[a * sm.samples + b] = cube.get(e0 + a, c, s0 + b);
                    }
                }
                r.ger(Complex64::new(1.0, 0.0), &x, &x.map(|v| v.conj()), Complex64::new(1.0, 0.0));
                count += 1;
            }
        }
    }
    r /= Complex64::new(count as f64, 0.0);
    // Backward average: J conj(R) J, J the exchange matrix.
    let mut fb = r.clone();
    for i in 0..m {
        for j in 0..m {
            fb[(i, j)] = 0.5 * (r[(i, j)] + r[(m - 1 - i, m - 1 - j)].conj());
        }
    }
    Ok(fb)
}

/// Signal-subspace basis (columns) of the `n_sources` largest eigenvalues.
fn signal_subspace(r: &DMatrix<Complex64>, n_sources: usize) -> Result<(DMatrix<Complex64>, f64)> {
    let m = r.nrows();
    let trace: f64 = (0..m).map(|i| r[(i, i)].re).sum();
    if !(trace > 1e-300) || !trace.is_finite() {
        return Err(Error::InsufficientSnapshots("covariance is zero".into()));
    }
    let eig = r.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut es = DMatrix::<Complex64>::zeros(m, n_sources);
    for (k, &i) in order.iter().take(n_sources).enumerate() {
        es.set_column(k, &eig.eigenvectors.column(i));
    }
    let noise = order[n_sources..].iter().map(|&i| eig.eigenvalues[i].max(0.0)).sum::<f64>() / (m - n_sources) as f64;
    Ok((es, noise))
}

fn steering(cfg: &ChirpConfig, sm: Smoothing, range: f64, aoa: f64) -> DVector<Complex64> {
    let fb = beat_frequency(cfg, 2.0 * range);
    DVector::from_fn(sm.rx * sm.samples, |i, _| {
        let (e, n) = (i / sm.samples, i % sm.samples);
        Complex64::from_polar(1.0, TAU * fb * n as f64 / cfg.sample_rate + PI * e as f64 * aoa.sin())
    })
}

struct Analysis {
    spectrum: MusicSpectrum,
    covariance: DMatrix<Complex64>,
}

fn analyze(cube: &RxCube, cfg: &ChirpConfig, grid: &MusicGrid, n_sources: usize, sm: Smoothing) -> Result<Analysis> {
    grid.validate()?;
    let m = sm.rx * sm.samples;
    if n_sources == 0 || n_sources >= m {
        return Err(Error::InvalidParameter(format!("n_sources {n_sources} for subarray size {m}")));
    }
    let snapshots = cube.chirp_count()
        * (cube.rx_count() + 1).saturating_sub(sm.rx)
        * (cube.samples_per_chirp() + 1).saturating_sub(sm.samples);
    if snapshots <= n_sources {
        return Err(Error::InsufficientSnapshots(format!("{snapshots} snapshots for {n_sources} sources")));
    }
    let covariance = smoothed_covariance(cube, sm)?;
    let (es, noise_power) = signal_subspace(&covariance, n_sources)?;
    let ranges = grid.ranges();
    let angles_deg = grid.angles_deg();
    let angle_steer: Vec<Vec<Complex64>> = angles_deg
        .iter()
        .map(|a| (0..sm.rx).map(|e| Complex64::from_polar(1.0, PI * e as f64 * a.to_radians().sin())).collect())
        .collect();
    let norm = m as f64;
    let mut values = Vec::with_capacity(ranges.len());
    for &r in &ranges {
        let fb = beat_frequency(cfg, 2.0 * r);
        let range_steer: Vec<Complex64> =
            (0..sm.samples).map(|n| Complex64::from_polar(1.0, TAU * fb * n as f64 / cfg.sample_rate)).collect();
        // The steering vector factors into range and angle parts, so the
        // fast-time sums are shared by every angle on this row.
        let partial: Vec<Vec<Complex64>> = (0..n_sources)
            .map(|k| {
                (0..sm.rx)
                    .map(|e| (0..sm.samples).map(|n| es[(e * sm.samples + n, k)].conj() * range_steer[n]).sum())
                    .collect()
            })
            .collect();
        let row = angle_steer
            .iter()
            .map(|aa| {
                let proj: f64 = partial
                    .iter()
                    .map(|p| p.iter().zip(aa).map(|(x, y)| x * y).sum::<Complex64>().norm_sqr())
                    .sum();
                let denom = (norm - proj).max(norm * 1e-15);
                -10.0 * denom.log10()
            })
            .collect();
        values.push(row);
    }
    Ok(Analysis { spectrum: MusicSpectrum { ranges, angles_deg, values, noise_power }, covariance })
}

/// MUSIC pseudo-spectrum `1 / (|a|^2 - |E_s^H a|^2)` over the grid, with the
/// steering vector `exp(j 2pi f_b(r) n / fs) x exp(j pi m sin(theta))`.
pub fn music_spectrum(
    cube: &RxCube,
    cfg: &ChirpConfig,
    grid: &MusicGrid,
    n_sources: usize,
    sm: Smoothing,
) -> Result<MusicSpectrum> {
    Ok(analyze(cube, cfg, grid, n_sources, sm)?.spectrum)
}

/// Peaks of one MUSIC run with the noise floor they were estimated against.
#[derive(Debug, Clone, PartialEq)]
pub struct MusicScan {
    pub peaks: Vec<MusicPeak>,
    pub noise_power: f64,
}

impl MusicScan {
    /// Peak power over the noise floor, dB.
    pub fn snr_db(&self, peak: &MusicPeak) -> f64 {
        peak.power - 10.0 * self.noise_power.max(1e-300).log10()
    }
}

/// Source powers for fixed steering vectors: the diagonal of
/// `A+ (R - noise I) A+^H`, falling back to per-vector Bartlett power when
/// the steering matrix is singular.
fn source_powers(covariance: &DMatrix<Complex64>, steer: &[DVector<Complex64>], noise: f64) -> Vec<f64> {
    let m = covariance.nrows();
    let a = DMatrix::from_columns(steer);
    let gram = a.adjoint() * &a;
    let denoised = covariance - DMatrix::<Complex64>::identity(m, m) * Complex64::new(noise, 0.0);
    match gram.try_inverse() {
        Some(inv) => {
            let pinv = inv * a.adjoint();
            let p = &pinv * denoised * pinv.adjoint();
            (0..steer.len()).map(|i| p[(i, i)].re).collect()
        }
        None => steer
            .iter()
            .map(|s| (s.adjoint() * &denoised * s)[(0, 0)].re / (m * m) as f64)
            .collect(),
    }
}

/// The `n_sources` highest pseudo-spectrum maxima, each carrying its source
/// power (dB per sample) from a joint least-squares fit, strongest first.
pub fn music_scan(cube: &RxCube, cfg: &ChirpConfig, grid: &MusicGrid, n_sources: usize, sm: Smoothing) -> Result<MusicScan> {
    let Analysis { spectrum, covariance } = analyze(cube, cfg, grid, n_sources, sm)?;
    let picked: Vec<MusicPeak> = spectrum.peaks().into_iter().take(n_sources).collect();
    let steer: Vec<DVector<Complex64>> = picked.iter().map(|p| steering(cfg, sm, p.range, p.aoa)).collect();
    let powers = source_powers(&covariance, &steer, spectrum.noise_power);
    let mut peaks: Vec<MusicPeak> = picked
        .into_iter()
        .zip(powers)
        .map(|(p, w)| MusicPeak { power: 10.0 * w.max(1e-300).log10(), ..p })
        .collect();
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power).then(a.range.total_cmp(&b.range)));
    Ok(MusicScan { peaks, noise_power: spectrum.noise_power })
}

/// Peaks of [`music_scan`].
pub fn music_2d(cube: &RxCube, cfg: &ChirpConfig, grid: &MusicGrid, n_sources: usize, sm: Smoothing) -> Result<Vec<MusicPeak>> {
    Ok(music_scan(cube, cfg, grid, n_sources, sm)?.peaks)
}

/// IRS position from its retro-mode peak. `None` means no peak carried the
/// IRS's on-off signature.
pub fn localize_irs(peak: Option<&MusicPeak>, radar: &RadarSite) -> Result<Point2> {
    let p = peak.ok_or(Error::IrsNotFound)?;
    Ok(irs_position(radar.position, p.range, radar.boresight + p.aoa))
}

/// Target position from the relay path length and the IRS leg.
pub fn localize_target(total_path: f64, d_rs: f64, alpha: f64, phi: f64, irs: Point2) -> Result<Point2> {
    let d_st = split_relay_path(total_path, d_rs)?;
    Ok(target_position(irs, d_st, alpha, phi))
}

/// IRS-target leg `total_path - d_rs`.
pub fn split_relay_path(total_path: f64, d_rs: f64) -> Result<f64> {
    if !total_path.is_finite() || !d_rs.is_finite() {
        return Err(Error::NonFinite("relay path"));
    }
    if total_path < d_rs {
        return Err(Error::NegativeLeg { total: total_path, d_rs });
    }
    Ok(total_path - d_rs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeakLabel {
    LoS,
    NlosViaIrs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Peaks must be strictly within this many dB of the strongest.
    pub relative_threshold_db: f64,
    pub range_tolerance: f64,
    pub angle_tolerance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { relative_threshold_db: 13.0, range_tolerance: 0.15, angle_tolerance: 5f64.to_radians() }
    }
}

/// Labels the significant peaks of an IRS-on capture. A peak with a matching
/// significant peak in the IRS-off capture is line-of-sight; one that vanishes
/// with the IRS off came via the IRS. Significance is relative to the
/// strongest IRS-on peak.
pub fn classify_nlos(on: &[MusicPeak], off: &[MusicPeak], cfg: &ClassifyConfig) -> Vec<(MusicPeak, PeakLabel)> {
    let Some(top) = on.iter().map(|p| p.power).reduce(f64::max) else {
        return Vec::new();
    };
    let floor = top - cfg.relative_threshold_db;
    on.iter()
        .filter(|p| p.power > floor)
        .map(|p| {
            let persists = off.iter().any(|q| {
                q.power > floor
                    && (q.range - p.range).abs() <= cfg.range_tolerance
                    && (q.aoa - p.aoa).abs() <= cfg.angle_tolerance
            });
            (*p, if persists { PeakLabel::LoS } else { PeakLabel::NlosViaIrs })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::signal::{noise_power_for_snr, synthesize_array_frames, PathEcho};

    fn cube(echoes: &[PathEcho], snr_db: Option<f64>, seed: u64) -> (ChirpConfig, RxCube) {
        let cfg = ChirpConfig::default();
        let noise = snr_db.map_or(0.0, |s| noise_power_for_snr(echoes, s));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chirps: Vec<Vec<IqFrame>> = (0..cfg.chirps_per_slot)
            .map(|c| synthesize_array_frames(&cfg, echoes, noise, c, 4, &mut rng).unwrap())
            .collect();
        (cfg, RxCube::from_chirps(&chirps).unwrap())
    }

    fn grid() -> MusicGrid {
        MusicGrid { range_min: 0.5, range_max: 5.0, range_step: 0.05, angle_min_deg: -60.0, angle_max_deg: 60.0, angle_step_deg: 1.0 }
    }

    #[test]
    fn single_source_noiseless() {
        let (cfg, c) = cube(&[PathEcho::at_range(3.0, 1.0).with_aoa(20f64.to_radians())], None, 0);
        let g = grid();
        let p = music_2d(&c, &cfg, &g, 1, Smoothing::default()).unwrap();
        assert!((p[0].range - 3.0).abs() <= g.range_step + 1e-9, "{:?}", p[0]);
        assert!((p[0].aoa.to_degrees() - 20.0).abs() <= g.angle_step_deg + 1e-9, "{:?}", p[0]);
    }

    #[test]
    fn two_sources_at_30_db() {
        let echoes = [
            PathEcho::at_range(1.0, 1.0).with_aoa(0.0),
            PathEcho::at_range(2.2, 0.6).with_aoa(0.0),
        ];
        let (cfg, c) = cube(&echoes, Some(30.0), 4);
        let g = grid();
        let spec = music_spectrum(&c, &cfg, &g, 2, Smoothing::default()).unwrap();
        let p = spec.peaks();
        // Brute-force oracle: the two largest cells along the zero-angle column.
        let j0 = spec.angles_deg.iter().position(|a| a.abs() < 1e-9).unwrap();
        let col: Vec<f64> = spec.values.iter().map(|r| r[j0]).collect();
        let best = (0..col.len()).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        assert_eq!(p[0].range, spec.ranges[best]);
        let mut found: Vec<f64> = p[..2].iter().map(|q| q.range).collect();
        found.sort_by(f64::total_cmp);
        assert!((found[0] - 1.0).abs() < 0.1 && (found[1] - 2.2).abs() < 0.1, "{:?}", &p[..2]);
    }

    #[test]
    fn peak_power_and_noise_floor() {
        let (cfg, c) = cube(&[PathEcho::at_range(2.0, 0.5).with_aoa(0.2)], Some(20.0), 9);
        let g = grid();
        let scan = music_scan(&c, &cfg, &g, 1, Smoothing::default()).unwrap();
        // 0.25 signal power per sample at 20 dB SNR.
        assert!((scan.peaks[0].power - 10.0 * 0.25f64.log10()).abs() < 0.5, "{:?}", scan.peaks[0]);
        assert!((10.0 * (scan.noise_power / 0.0025).log10()).abs() < 1.0, "{}", scan.noise_power);
        assert!((scan.snr_db(&scan.peaks[0]) - 20.0).abs() < 1.5);
    }

    #[test]
    fn joint_fit_separates_leakage() {
        // A weak source beside a strong one keeps its own power.
        let echoes = [
            PathEcho::at_range(1.0, 1.0).with_aoa(0.0),
            PathEcho::at_range(2.5, 0.1).with_aoa(0.0),
            PathEcho::at_range(3.5, 0.3).with_aoa(-0.6),
        ];
        let (cfg, c) = cube(&echoes, Some(40.0), 5);
        let scan = music_scan(&c, &cfg, &grid(), 3, Smoothing::default()).unwrap();
        let weak = scan.peaks.iter().find(|p| (p.range - 2.5).abs() < 0.1).expect("weak source");
        assert!((weak.power + 20.0).abs() < 1.0, "{weak:?}");
    }

    #[test]
    fn zero_cube_is_rank_deficient() {
        let (cfg, c) = cube(&[], None, 0);
        assert!(matches!(music_2d(&c, &cfg, &grid(), 1, Smoothing::default()), Err(Error::InsufficientSnapshots(_))));
    }

    #[test]
    fn scaling_keeps_argmax() {
        let (cfg, c) = cube(&[PathEcho::at_range(2.4, 1.0).with_aoa(-0.3)], Some(25.0), 2);
        let a = music_2d(&c, &cfg, &grid(), 1, Smoothing::default()).unwrap()[0];
        let b = music_2d(&c.scaled(Complex64::from_polar(37.0, 1.1)), &cfg, &grid(), 1, Smoothing::default()).unwrap()[0];
        assert_eq!((a.range, a.aoa), (b.range, b.aoa));
    }

    #[test]
    fn irs_from_peak() {
        let r = RadarSite::new(0, Point2::new(0.0, 0.0), 0.0, 0.0125);
        let p = MusicPeak { range: 1.0, aoa: 0.0, power: 0.0 };
        assert!(localize_irs(Some(&p), &r).unwrap().distance(&Point2::new(1.0, 0.0)) < 1e-12);
        let p = MusicPeak { range: 2.0, aoa: FRAC_PI_4, power: 0.0 };
        assert!(localize_irs(Some(&p), &r).unwrap().distance(&Point2::new(SQRT_2, SQRT_2)) < 1e-12);
        assert!(matches!(localize_irs(None, &r), Err(Error::IrsNotFound)));
    }

    #[test]
    fn target_from_relay() {
        let irs = Point2::new(1.0, 0.0);
        assert_eq!(localize_target(1.0, 1.0, 0.3, 0.0, irs).unwrap(), irs);
        let t = localize_target(1.0 + SQRT_2, 1.0, FRAC_PI_2, 0.0, irs).unwrap();
        assert!(t.distance(&Point2::new(1.0, SQRT_2)) < 1e-12);
        assert!(matches!(localize_target(0.5, 1.0, 0.0, 0.0, irs), Err(Error::NegativeLeg { .. })));
        let total = 3.7;
        assert_eq!(split_relay_path(total, 1.3).unwrap() + 1.3, total);
    }

    #[test]
    fn nlos_labels() {
        let irs = MusicPeak { range: 1.0, aoa: 0.0, power: -63.0 };
        let wall = MusicPeak { range: 3.0, aoa: 0.4, power: -76.0 };
        let tgt = MusicPeak { range: 2.0, aoa: 0.0, power: -70.0 };
        let los = MusicPeak { range: 2.5, aoa: -0.5, power: -65.0 };
        let out = classify_nlos(&[irs, wall, tgt, los], &[wall, los], &ClassifyConfig::default());
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], (irs, PeakLabel::NlosViaIrs));
        assert_eq!(out[1], (tgt, PeakLabel::NlosViaIrs));
        assert_eq!(out[2], (los, PeakLabel::LoS));
        assert!(classify_nlos(&[], &[], &ClassifyConfig::default()).is_empty());
    }
}
