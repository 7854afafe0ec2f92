use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prototype ceiling on the antenna switching frequency.
pub const DEFAULT_MAX_SWITCHING_HZ: f64 = 20.0;

pub fn data_rate(f: f64, n_r: u32) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() || n_r == 0 {
        return Err(Error::InvalidParameter(format!("F = {f}, N_r = {n_r}")));
    }
    Ok(f / (2.0 * n_r as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TxAntenna {
    Tx1,
    Tx2,
}

impl TxAntenna {
    pub fn index(self) -> usize {
        match self {
            Self::Tx1 => 0,
            Self::Tx2 => 1,
        }
    }
}

/// Radar-to-IRS transmission: bits encoded in chirp amplitude while the radar
/// alternates between its two TX antennas every `1 / f` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarTxPlan {
    /// Antenna switching frequency, Hz.
    pub f: f64,
    /// TX1/TX2 repetitions per bit.
    pub n_r: u32,
    pub a0: f64,
    pub a1: f64,
    pub bits: Vec<bool>,
    pub max_switching_hz: f64,
}

impl RadarTxPlan {
    pub fn new(f: f64, n_r: u32, a0: f64, a1: f64, bits: Vec<bool>) -> Self {
        Self { f, n_r, a0, a1, bits, max_switching_hz: DEFAULT_MAX_SWITCHING_HZ }
    }

    pub fn validate(&self) -> Result<()> {
        data_rate(self.f, self.n_r)?;
        if self.f > self.max_switching_hz {
            return Err(Error::FrequencyOutOfBand(self.f));
        }
        if !(0.0 < self.a0 && self.a0 < self.a1 && self.a1.is_finite()) {
            return Err(Error::InvalidParameter(format!("need 0 < A0 < A1, got {} / {}", self.a0, self.a1)));
        }
        Ok(())
    }

    pub fn segment_seconds(&self) -> f64 {
        1.0 / self.f
    }

    pub fn bit_seconds(&self) -> f64 {
        2.0 * self.n_r as f64 / self.f
    }

    pub fn duration(&self) -> f64 {
        self.bits.len() as f64 * self.bit_seconds()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub antenna: TxAntenna,
    pub amplitude: f64,
}

/// Each bit becomes `n_r` (TX1, TX2) pairs, every segment `1 / f` long, at
/// `a1` for a one and `a0` for a zero.
pub fn encode_radar_bits(plan: &RadarTxPlan) -> Result<Vec<TxSegment>> {
    plan.validate()?;
    let seg = plan.segment_seconds();
    let mut out = Vec::with_capacity(plan.bits.len() * 2 * plan.n_r as usize);
    let mut k = 0usize;
    for &b in &plan.bits {
        let amplitude = if b { plan.a1 } else { plan.a0 };
        for _ in 0..plan.n_r {
            for antenna in [TxAntenna::Tx1, TxAntenna::Tx2] {
                out.push(TxSegment { t_start: k as f64 * seg, t_end: (k + 1) as f64 * seg, antenna, amplitude });
                k += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_rate_examples() {
        assert_eq!(data_rate(3906.25, 1).unwrap(), 1953.125);
        assert_eq!(data_rate(20.0, 1).unwrap(), 10.0);
        assert_eq!(data_rate(10.0, 5).unwrap(), 1.0);
        assert!(data_rate(0.0, 1).is_err());
        assert!(data_rate(1.0, 0).is_err());
    }

    #[test]
    fn single_one_bit() {
        let plan = RadarTxPlan::new(10.0, 1, 0.3, 1.0, vec![true]);
        let s = encode_radar_bits(&plan).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].antenna, TxAntenna::Tx1);
        assert_eq!(s[1].antenna, TxAntenna::Tx2);
        for seg in &s {
            assert!((seg.t_end - seg.t_start - 0.1).abs() < 1e-12);
            assert_eq!(seg.amplitude, 1.0);
        }
    }

    #[test]
    fn empty_and_mixed() {
        let plan = RadarTxPlan::new(10.0, 1, 0.3, 1.0, vec![]);
        assert!(encode_radar_bits(&plan).unwrap().is_empty());
        let plan = RadarTxPlan::new(10.0, 1, 0.3, 1.0, vec![true, false]);
        let amps: Vec<f64> = encode_radar_bits(&plan).unwrap().iter().map(|s| s.amplitude).collect();
        assert_eq!(amps, [1.0, 1.0, 0.3, 0.3]);
        assert!((plan.duration() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn plan_checks() {
        assert!(RadarTxPlan::new(25.0, 1, 0.3, 1.0, vec![]).validate().is_err());
        assert!(RadarTxPlan::new(10.0, 1, 1.0, 0.3, vec![]).validate().is_err());
        let mut p = RadarTxPlan::new(25.0, 1, 0.3, 1.0, vec![]);
        p.max_switching_hz = 50.0;
        assert!(p.validate().is_ok());
    }
}
