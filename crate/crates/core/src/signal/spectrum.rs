use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

use super::{ChirpConfig, IqFrame, SPEED_OF_LIGHT};

fn hann(n: usize) -> Vec<f64> {
    // Periodic Hann; a single sample gets unit weight.
    if n == 1 {
        return vec![1.0];
    }
    (0..n).map(|k| 0.5 - 0.5 * (TAU * k as f64 / n as f64).cos()).collect()
}

/// Magnitude range profile of one chirp.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSpectrum {
    /// Window-normalised magnitudes: an on-bin tone of amplitude `a` peaks at `a`.
    pub magnitudes: Vec<f64>,
    /// One-way range covered by one bin, m.
    pub bin_width_m: f64,
}

impl RangeSpectrum {
    /// Bin `k` sits at one-way range `k * c * fs / (2 beta N)`; with
    /// `N = fs * T_chirp` this is `k * c / 2B`.
    pub fn range_of_bin(&self, k: usize) -> f64 {
        k as f64 * self.bin_width_m
    }

    pub fn bin_of_range(&self, r: f64) -> usize {
        ((r / self.bin_width_m).round().max(0.0) as usize).min(self.magnitudes.len().saturating_sub(1))
    }

    /// First bin holding the maximum magnitude.
    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (k, &m) in self.magnitudes.iter().enumerate() {
            if m > self.magnitudes[best] {
                best = k;
            }
        }
        best
    }

    pub fn peak_range(&self) -> f64 {
        self.range_of_bin(self.peak_bin())
    }
}

/// Hann-windowed complex spectrum of a sample block, normalised by the window sum.
pub fn range_fft_complex(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let w = hann(n);
    let norm: f64 = w.iter().sum();
    let mut buf: Vec<Complex64> = samples.iter().zip(&w).map(|(s, w)| s * w / norm).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

pub fn range_fft(frame: &IqFrame, cfg: &ChirpConfig) -> Result<RangeSpectrum> {
    if frame.is_empty() {
        return Err(Error::InsufficientSamples("empty frame".into()));
    }
    let spec = range_fft_complex(&frame.samples);
    let n = frame.len();
    Ok(RangeSpectrum {
        magnitudes: spec.iter().map(|c| c.norm()).collect(),
        bin_width_m: SPEED_OF_LIGHT * cfg.sample_rate / (2.0 * cfg.slope() * n as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPeak {
    pub range: f64,
    pub velocity: f64,
    pub power: f64,
    pub range_bin: usize,
    pub doppler_bin: usize,
}

/// Power map indexed `[doppler][range]`; Doppler rows are centred so row
/// `n_doppler / 2` is zero velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    pub power: Vec<Vec<f64>>,
    pub range_bin_m: f64,
    pub velocity_bin_mps: f64,
    pub peak: RdPeak,
}

impl RangeDopplerMap {
    pub fn n_doppler(&self) -> usize {
        self.power.len()
    }

    pub fn n_range(&self) -> usize {
        self.power.first().map_or(0, Vec::len)
    }

    pub fn velocity_of_row(&self, d: usize) -> f64 {
        (d as f64 - (self.n_doppler() / 2) as f64) * self.velocity_bin_mps
    }

    fn cell(&self, d: usize, k: usize) -> RdPeak {
        RdPeak {
            range: k as f64 * self.range_bin_m,
            velocity: self.velocity_of_row(d),
            power: self.power[d][k],
            range_bin: k,
            doppler_bin: d,
        }
    }

    /// Local maxima (8-neighbourhood, Doppler wraps) within `rel_db` of the
    /// global peak, strongest first.
    pub fn peaks(&self, rel_db: f64) -> Vec<RdPeak> {
        let nd = self.n_doppler();
        let nr = self.n_range();
        let floor = self.peak.power * 10f64.powf(-rel_db / 10.0);
        let mut out = Vec::new();
        for d in 0..nd {
            for k in 0..nr {
                let p = self.power[d][k];
                if p < floor || p <= 0.0 {
                    continue;
                }
                let mut is_max = true;
                'nb: for dd in [nd - 1, 0, 1] {
                    for dk in [-1i64, 0, 1] {
                        if dd == 0 && dk == 0 {
                            continue;
                        }
                        let kk = k as i64 + dk;
                        if kk < 0 || kk >= nr as i64 {
                            continue;
                        }
                        let q = self.power[(d + dd) % nd][kk as usize];
                        if q > p {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push(self.cell(d, k));
                }
            }
        }
        out.sort_by(|a, b| b.power.total_cmp(&a.power).then(a.range_bin.cmp(&b.range_bin)));
        out
    }

    /// Fastest peak (largest |v|) among those within `rel_db` of the global peak.
    pub fn fastest_peak(&self, rel_db: f64) -> Option<RdPeak> {
        self.peaks(rel_db)
            .into_iter()
            .max_by(|a, b| a.velocity.abs().total_cmp(&b.velocity.abs()).then(b.range_bin.cmp(&a.range_bin)))
    }

    /// Strongest Doppler row in one range column.
    pub fn velocity_at_range_bin(&self, k: usize) -> Option<f64> {
        if k >= self.n_range() {
            return None;
        }
        let mut best = 0;
        for d in 0..self.n_doppler() {
            if self.power[d][k] > self.power[best][k] {
                best = d;
            }
        }
        Some(self.velocity_of_row(best))
    }
}

/// Range-Doppler power map over a burst of uniformly spaced chirps.
pub fn range_doppler(frames: &[IqFrame], cfg: &ChirpConfig) -> Result<RangeDopplerMap> {
    if frames.len() < 2 {
        return Err(Error::InsufficientSlowTime(frames.len()));
    }
    let n = frames[0].len();
    if n == 0 || frames.iter().any(|f| f.len() != n) {
        return Err(Error::InsufficientSamples("frames must be non-empty and equal length".into()));
    }
    let spacing = frames[1].t0 - frames[0].t0;
    if !(spacing > 0.0) || frames.windows(2).any(|w| ((w[1].t0 - w[0].t0) - spacing).abs() > 1e-9 * spacing.max(1e-12)) {
        return Err(Error::InvalidParameter("chirp spacing must be uniform and positive".into()));
    }
    let m = frames.len();
    let columns: Vec<Vec<Complex64>> = frames.iter().map(|f| range_fft_complex(&f.samples)).collect();

    let w = hann(m);
    let norm: f64 = w.iter().sum();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut power = vec![vec![0.0; n]; m];
    let mut slow = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        for (c, s) in slow.iter_mut().enumerate() {
            *s = columns[c][k] * w[c] / norm;
        }
        fft.process(&mut slow);
        for (d, s) in slow.iter().enumerate() {
            // fftshift: row (d + m/2) % m holds frequency index d.
            power[(d + m / 2) % m][k] = s.norm_sqr();
        }
    }

    let range_bin_m = SPEED_OF_LIGHT * cfg.sample_rate / (2.0 * cfg.slope() * n as f64);
    let velocity_bin_mps = cfg.wavelength() / (2.0 * m as f64 * spacing);
    let mut map = RangeDopplerMap {
        power,
        range_bin_m,
        velocity_bin_mps,
        peak: RdPeak { range: 0.0, velocity: 0.0, power: 0.0, range_bin: 0, doppler_bin: 0 },
    };
    let (mut bd, mut bk) = (0, 0);
    for d in 0..m {
        for k in 0..n {
            if map.power[d][k] > map.power[bd][bk] {
                bd = d;
                bk = k;
            }
        }
    }
    map.peak = map.cell(bd, bk);
    Ok(map)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::signal::{synthesize_beat_frame, PathEcho};

    /// Brute-force DFT magnitude, no window.
    fn dft_magnitudes(x: &[Complex64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, v)| v * Complex64::from_polar(1.0, -TAU * (k * t) as f64 / n as f64))
                    .sum::<Complex64>()
                    .norm()
            })
            .collect()
    }

    fn argmax(v: &[f64]) -> usize {
        v.iter().enumerate().fold(0, |b, (i, &x)| if x > v[b] { i } else { b })
    }

    fn burst(cfg: &ChirpConfig, echoes: &[PathEcho], m: usize) -> Vec<IqFrame> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        (0..m).map(|c| synthesize_beat_frame(cfg, echoes, 0.0, c, &mut rng).unwrap()).collect()
    }

    #[test]
    fn single_echo_peak_matches_brute_force_dft() {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for r in [1.2, 2.0, 3.0, 4.8] {
            let f = synthesize_beat_frame(&cfg, &[PathEcho::at_range(r, 1.0)], 0.0, 0, &mut rng).unwrap();
            let fb = cfg.beat_for_range(r);
            let expected = (fb * f.len() as f64 / cfg.sample_rate).round() as usize;
            assert_eq!(argmax(&dft_magnitudes(&f.samples)), expected);
            assert_eq!(range_fft(&f, &cfg).unwrap().peak_bin(), expected);
        }
    }

    #[test]
    fn two_echoes_give_two_peaks() {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let echoes = [PathEcho::at_range(1.2, 1.0), PathEcho::at_range(4.2, 0.8)];
        let f = synthesize_beat_frame(&cfg, &echoes, 0.0, 0, &mut rng).unwrap();
        let oracle = dft_magnitudes(&f.samples);
        let spec = range_fft(&f, &cfg).unwrap();
        for r in [1.2, 4.2] {
            let k = spec.bin_of_range(r);
            assert!(oracle[k] > oracle[k - 1] && oracle[k] > oracle[k + 1]);
            assert!(spec.magnitudes[k] > spec.magnitudes[k - 1] && spec.magnitudes[k] > spec.magnitudes[k + 1]);
        }
    }

    #[test]
    fn tone_at_three_metres() {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = synthesize_beat_frame(&cfg, &[PathEcho::at_range(3.0, 1.0)], 0.0, 0, &mut rng).unwrap();
        let spec = range_fft(&f, &cfg).unwrap();
        assert!((spec.peak_range() - 3.0).abs() <= 0.6);
        assert!((spec.magnitudes[spec.peak_bin()] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_frame_flat_spectrum() {
        let cfg = ChirpConfig::default();
        let f = IqFrame::zeros(&cfg, 0);
        assert!(range_fft(&f, &cfg).unwrap().magnitudes.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn weak_noise_keeps_argmax() {
        let cfg = ChirpConfig::default();
        let echoes = [PathEcho::at_range(2.8, 1.0)];
        let clean = synthesize_beat_frame(&cfg, &echoes, 0.0, 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let want = range_fft(&clean, &cfg).unwrap().peak_bin();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noisy = synthesize_beat_frame(&cfg, &echoes, 1e-4, 0, &mut rng).unwrap();
            assert_eq!(range_fft(&noisy, &cfg).unwrap().peak_bin(), want);
        }
    }

    #[test]
    fn stationary_echo_range_doppler() {
        let cfg = ChirpConfig::default();
        let map = range_doppler(&burst(&cfg, &[PathEcho::at_range(3.0, 1.0)], 64), &cfg).unwrap();
        assert!((map.peak.range - 3.0).abs() <= map.range_bin_m);
        assert!(map.peak.velocity.abs() <= map.velocity_bin_mps);
    }

    #[test]
    fn moving_echo_velocity() {
        let cfg = ChirpConfig::default();
        let e = PathEcho::at_range(3.0, 1.0).with_velocity(1.0);
        let map = range_doppler(&burst(&cfg, &[e], 64), &cfg).unwrap();
        assert!((map.peak.velocity - 1.0).abs() <= map.velocity_bin_mps, "{:?}", map.peak);
        let e = PathEcho::at_range(3.0, 1.0).with_velocity(-1.0);
        let map = range_doppler(&burst(&cfg, &[e], 64), &cfg).unwrap();
        assert!((map.peak.velocity + 1.0).abs() <= map.velocity_bin_mps);
    }

    #[test]
    fn max_speed_selector() {
        let cfg = ChirpConfig::default();
        let echoes = [PathEcho::at_range(1.8, 1.0), PathEcho::at_range(4.2, 0.7).with_velocity(1.0)];
        let map = range_doppler(&burst(&cfg, &echoes, 64), &cfg).unwrap();
        let peaks = map.peaks(20.0);
        // Brute-force scan: strongest cell near each true (r, v).
        for e in &echoes {
            assert!(peaks.iter().any(|p| (p.range - e.range()).abs() <= map.range_bin_m
                && (p.velocity - e.doppler_velocity).abs() <= map.velocity_bin_mps));
        }
        let fast = map.fastest_peak(20.0).unwrap();
        assert!((fast.velocity - 1.0).abs() <= map.velocity_bin_mps);
        assert!((fast.range - 4.2).abs() <= map.range_bin_m);
    }

    #[test]
    fn needs_two_frames() {
        let cfg = ChirpConfig::default();
        let frames = burst(&cfg, &[PathEcho::at_range(3.0, 1.0)], 1);
        assert!(matches!(range_doppler(&frames, &cfg), Err(Error::InsufficientSlowTime(1))));
    }
}
