//! Frequency-division access for several radars sharing one IRS.
//!
//! Alternating between two TX antennas of unequal gain every `1 / F` seconds
//! puts an amplitude subcarrier at `F / 2` on the envelope, with the radar's
//! bit amplitudes riding on it. Detection looks for those subcarrier lines and
//! separation band-passes one of them and takes its Hilbert magnitude.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::link::EnvelopeTrace;

/// Relative half-width of the detection exclusion zone and of the band-pass
/// filter around a subcarrier.
const BAND_HALF_WIDTH: f64 = 0.25;

/// Range of switching frequencies the IRS listens for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectConfig {
    pub f_min: f64,
    pub f_max: f64,
    /// A line must exceed this multiple of the median in-band magnitude.
    pub min_prominence: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self { f_min: 1.0, f_max: 20.0, min_prominence: 6.0 }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect()
}

/// Switching frequencies present in the trace, ascending.
///
/// Lines are local maxima of the windowed magnitude spectrum inside the
/// subcarrier band; the threshold is half the strongest line, and weaker lines
/// within the filter half-width of a stronger one are its sidebands. Reported
/// values are twice the line frequency, with resolution `2 fs / len`.
pub fn detect_radars(trace: &EnvelopeTrace, cfg: &DetectConfig) -> Result<Vec<f64>> {
    let n = trace.len();
    if n < 4 {
        return Ok(Vec::new());
    }
    if trace.duration() < 2.0 / cfg.f_min {
        return Err(Error::InsufficientSamples(format!(
            "{:.2} s trace, need {:.2} s for F = {}",
            trace.duration(),
            2.0 / cfg.f_min,
            cfg.f_min
        )));
    }
    let mean = trace.samples.iter().sum::<f64>() / n as f64;
    let w = hann(n);
    let mut buf: Vec<Complex64> =
        trace.samples.iter().zip(&w).map(|(s, w)| Complex64::new((s - mean) * w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let df = trace.sample_rate / n as f64;
    let lo = (1.0 - BAND_HALF_WIDTH) * cfg.f_min / 2.0;
    let hi = ((1.0 + BAND_HALF_WIDTH) * cfg.f_max / 2.0).min(trace.sample_rate / 2.0);
    let band: Vec<usize> = (1..mag.len() - 1).filter(|&k| (lo..=hi).contains(&(k as f64 * df))).collect();
    if band.is_empty() {
        return Ok(Vec::new());
    }
    let mut sorted: Vec<f64> = band.iter().map(|&k| mag[k]).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut peaks: Vec<usize> =
        band.iter().copied().filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]).collect();
    let Some(top) = peaks.iter().map(|&k| mag[k]).reduce(f64::max) else {
        return Ok(Vec::new());
    };
    let scale = trace.samples.iter().map(|v| v.abs()).fold(0.0, f64::max) * n as f64;
    if top <= 1e-9 * scale || top < cfg.min_prominence * median {
        return Ok(Vec::new());
    }
    peaks.retain(|&k| mag[k] >= top / 2.0);
    peaks.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]).then(a.cmp(&b)));
    let mut accepted: Vec<usize> = Vec::new();
    for k in peaks {
        let f = k as f64 * df;
        if accepted.iter().all(|&j| (f - j as f64 * df).abs() > BAND_HALF_WIDTH * j as f64 * df) {
            accepted.push(k);
        }
    }
    let mut out: Vec<f64> = accepted.iter().map(|&k| 2.0 * k as f64 * df).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Transposed direct-form-II biquad.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
}

impl Biquad {
    fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let z2 = z1 * z1;
        (self.b[0] + self.b[1] * z1 + self.b[2] * z2) / (1.0 + self.a[0] * z1 + self.a[1] * z2)
    }

    fn run(&self, x: &mut [f64]) {
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let y = self.b[0] * *v + z1;
            z1 = self.b[1] * *v - self.a[0] * y + z2;
            z2 = self.b[2] * *v - self.a[1] * y;
            *v = y;
        }
    }
}

/// Fourth-order Butterworth band-pass between `lo` and `hi` Hz as two
/// biquads: second-order low-pass prototype, low-pass to band-pass mapping,
/// bilinear transform with prewarped edges, unit gain at the geometric centre.
fn butterworth_bandpass(lo: f64, hi: f64, fs: f64) -> [Biquad; 2] {
    let k = 2.0 * fs;
    let w1 = k * (PI * lo / fs).tan();
    let w2 = k * (PI * hi / fs).tan();
    let w0 = (w1 * w2).sqrt();
    let bw = w2 - w1;
    let p = Complex64::from_polar(1.0, 3.0 * PI / 4.0);
    let disc = (p * p * bw * bw - 4.0 * w0 * w0).sqrt();
    let mut sections = [(p * bw + disc) / 2.0, (p * bw - disc) / 2.0].map(|s| {
        let z = (k + s) / (k - s);
        Biquad { b: [1.0, 0.0, -1.0], a: [-2.0 * z.re, z.norm_sqr()] }
    });
    let wc = 2.0 * (w0 / k).atan();
    let g = sections.iter().map(|s| s.response(wc).norm()).product::<f64>();
    let per = g.sqrt().recip();
    for s in &mut sections {
        s.b = s.b.map(|v| v * per);
    }
    sections
}

/// Zero-phase forward-backward filtering with odd extension at both ends.
fn filtfilt(sections: &[Biquad], x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    let pad = pad.min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));
    for s in sections {
        s.run(&mut ext);
    }
    ext.reverse();
    for s in sections {
        s.run(&mut ext);
    }
    ext.reverse();
    ext[pad..pad + n].to_vec()
}

/// Magnitude of the analytic signal.
fn hilbert_magnitude(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let scale = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *c *= scale;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.norm() / n as f64).collect()
}

/// Envelope of one radar's subcarrier, ready for [`super::decode_bits`].
///
/// Fourth-order Butterworth band-pass around `F / 2` with edges at `+-25 %`,
/// run forward and backward, then the Hilbert
/// magnitude. Output levels scale with the radar's bit amplitude.
pub fn separate_radar(trace: &EnvelopeTrace, f: f64) -> Result<EnvelopeTrace> {
    let fs = trace.sample_rate;
    if !(f > 0.0 && f < fs / 2.0) {
        return Err(Error::FrequencyOutOfBand(f));
    }
    if trace.len() < 8 {
        return Err(Error::InsufficientSamples(format!("{} samples", trace.len())));
    }
    let fc = f / 2.0;
    let lo = (1.0 - BAND_HALF_WIDTH) * fc;
    let hi = (1.0 + BAND_HALF_WIDTH) * fc;
    let sections = butterworth_bandpass(lo, hi, fs);
    let mean = trace.samples.iter().sum::<f64>() / trace.len() as f64;
    let centred: Vec<f64> = trace.samples.iter().map(|v| v - mean).collect();
    let pad = (3.0 * fs / lo).ceil() as usize;
    let filtered = filtfilt(&sections, &centred, pad);
    Ok(EnvelopeTrace { samples: hilbert_magnitude(&filtered), t0: trace.t0, sample_rate: fs })
}
