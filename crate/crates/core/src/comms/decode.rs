use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::link::EnvelopeTrace;

/// A bit is a zero when its level is below this fraction of the one-bit level.
pub const BIT_ZERO_RATIO: f64 = 0.6;

/// Fraction of each antenna segment trimmed at both ends before averaging, to
/// skip detector settling and sub-sample misalignment.
const SEGMENT_TRIM: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitTiming {
    pub f: f64,
    pub n_r: u32,
}

impl BitTiming {
    pub fn segment_samples(&self, fs: f64) -> f64 {
        fs / self.f
    }

    pub fn bit_samples(&self, fs: f64) -> f64 {
        2.0 * self.n_r as f64 * fs / self.f
    }

    fn validate(&self) -> Result<()> {
        if !(self.f > 0.0) || !self.f.is_finite() || self.n_r == 0 {
            return Err(Error::InvalidParameter(format!("bit timing F = {}, N_r = {}", self.f, self.n_r)));
        }
        Ok(())
    }
}

/// Mean level of the samples in the central part of `[start, end)`, or the
/// sample nearest the centre if the window is narrower than one sample.
fn window_mean(x: &[f64], start: f64, end: f64) -> f64 {
    let w = end - start;
    let lo = (start + SEGMENT_TRIM * w).ceil().max(0.0) as usize;
    let hi = ((end - SEGMENT_TRIM * w).ceil().max(0.0) as usize).min(x.len());
    if lo < hi {
        x[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
    } else {
        let c = (((start + end) / 2.0).round().max(0.0) as usize).min(x.len().saturating_sub(1));
        x[c]
    }
}

/// Per-bit amplitude: TX1 segments and TX2 segments are averaged separately,
/// then combined, for every whole bit contained in the trace.
pub fn bit_levels(trace: &EnvelopeTrace, timing: &BitTiming) -> Result<Vec<f64>> {
    timing.validate()?;
    let seg = timing.segment_samples(trace.sample_rate);
    let per_bit = timing.bit_samples(trace.sample_rate);
    let n_bits = (trace.len() as f64 / per_bit + 1e-9).floor() as usize;
    if n_bits == 0 {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, one bit needs {per_bit:.1}",
            trace.len()
        )));
    }
    let nr = timing.n_r as usize;
    Ok((0..n_bits)
        .map(|b| {
            let base = b as f64 * per_bit;
            let mut halves = [0.0; 2];
            for r in 0..nr {
                for (h, acc) in halves.iter_mut().enumerate() {
                    let s = base + (2 * r + h) as f64 * seg;
                    *acc += window_mean(&trace.samples, s, s + seg);
                }
            }
            (halves[0] + halves[1]) / (2.0 * nr as f64)
        })
        .collect())
}

/// Decodes every whole bit in a trace aligned to a packet start. The one-bit
/// reference is the highest level among the `1` positions of the known
/// `prefix`; a bit is `0` iff its level is strictly below 0.6 of it.
pub fn decode_bits(trace: &EnvelopeTrace, timing: &BitTiming, prefix: &[bool]) -> Result<Vec<bool>> {
    let levels = bit_levels(trace, timing)?;
    let reference = prefix
        .iter()
        .zip(&levels)
        .filter(|(b, _)| **b)
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !reference.is_finite() {
        return Err(Error::InvalidParameter("prefix has no 1 bit inside the trace".into()));
    }
    // Relative slack absorbs rounding in the plateau averages so a level that
    // sits exactly on the threshold stays a one.
    let threshold = BIT_ZERO_RATIO * reference * (1.0 - 1e-12);
    Ok(levels.iter().map(|&l| l >= threshold).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncConfig {
    /// Minimum normalised correlation accepted as a packet.
    pub min_confidence: f64,
    /// Local maxima within this distance of the best are treated as equal and
    /// the earliest one wins.
    pub tie_epsilon: f64,
    /// Lowest correlation kept by [`sync_candidates`] once some peak has
    /// reached `min_confidence`.
    pub candidate_floor: f64,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self { min_confidence: 0.8, tie_epsilon: 0.02, candidate_floor: 0.6 }
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

fn prefix_correlation(trace: &EnvelopeTrace, timing: &BitTiming, prefix: &[bool]) -> Result<Vec<f64>> {
    timing.validate()?;
    let per_bit = timing.bit_samples(trace.sample_rate);
    let w = (prefix.len() as f64 * per_bit).ceil() as usize;
    if w < 2 || trace.len() < w {
        return Err(Error::InsufficientSamples(format!("{} samples, prefix needs {w}", trace.len())));
    }
    let template: Vec<f64> = (0..w)
        .map(|n| {
            let b = ((n as f64 / per_bit).floor() as usize).min(prefix.len() - 1);
            if prefix[b] {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((0..=trace.len() - w).map(|o| pearson(&trace.samples[o..o + w], &template)).collect())
}

fn is_local_max(corr: &[f64], i: usize) -> bool {
    (i == 0 || corr[i] >= corr[i - 1]) && (i + 1 == corr.len() || corr[i] >= corr[i + 1])
}

/// Sample offset of the first packet: the earliest local maximum of the
/// normalised correlation between the trace and the prefix's on/off waveform
/// that comes within `tie_epsilon` of the global best.
pub fn sync_align(trace: &EnvelopeTrace, timing: &BitTiming, prefix: &[bool], cfg: &SyncConfig) -> Result<usize> {
    let corr = prefix_correlation(trace, timing, prefix)?;
    let best = corr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(best >= cfg.min_confidence) {
        return Err(Error::NoPacketFound { best: best.max(0.0), required: cfg.min_confidence });
    }
    let offset = (0..corr.len())
        .find(|&i| corr[i] >= best - cfg.tie_epsilon && is_local_max(&corr, i))
        .expect("global maximum is a local maximum");
    Ok(offset)
}

/// Every local maximum of the prefix correlation reaching `candidate_floor`,
/// earliest first, provided the best one reaches `min_confidence`. Filtered
/// traces can pull the true start below later, shifted matches, so the caller
/// picks the first candidate that frames a valid packet.
pub fn sync_candidates(trace: &EnvelopeTrace, timing: &BitTiming, prefix: &[bool], cfg: &SyncConfig) -> Result<Vec<usize>> {
    let corr = prefix_correlation(trace, timing, prefix)?;
    let best = corr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(best >= cfg.min_confidence) {
        return Err(Error::NoPacketFound { best: best.max(0.0), required: cfg.min_confidence });
    }
    let floor = cfg.candidate_floor.min(cfg.min_confidence);
    Ok((0..corr.len()).filter(|&i| corr[i] >= floor && is_local_max(&corr, i)).collect())
}
