use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, RadarSite};
use crate::irs::{default_rc_seconds, envelope_detect};

use super::decode::{decode_bits, sync_align, BitTiming, SyncConfig};
use super::packet::{PacketFormat, PAYLOAD_BITS};
use super::radar_tx::{encode_radar_bits, RadarTxPlan, TxAntenna, DEFAULT_MAX_SWITCHING_HZ};

pub const DEFAULT_MCU_RATE_HZ: f64 = 64.0;

/// Default TX2 gain relative to TX1 toward the IRS (-3 dB).
pub const DEFAULT_TX2_GAIN: f64 = 0.7;

/// Diode-detector output sampled by the IRS microcontroller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTrace {
    pub samples: Vec<f64>,
    pub t0: f64,
    pub sample_rate: f64,
}

impl EnvelopeTrace {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Self {
        Self { samples, t0: 0.0, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Trace starting at sample `offset`.
    pub fn skip(&self, offset: usize) -> EnvelopeTrace {
        let offset = offset.min(self.samples.len());
        EnvelopeTrace {
            samples: self.samples[offset..].to_vec(),
            t0: self.t0 + offset as f64 / self.sample_rate,
            sample_rate: self.sample_rate,
        }
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Adds white Gaussian noise of standard deviation `sigma` volts.
    pub fn add_noise<R: Rng + ?Sized>(&mut self, sigma: f64, rng: &mut R) {
        if sigma <= 0.0 {
            return;
        }
        for s in &mut self.samples {
            let n: f64 = rng.sample(StandardNormal);
            *s += sigma * n;
        }
    }
}

/// Noise standard deviation giving `snr_db` against the trace's mean power.
pub fn noise_sigma_for_snr(trace: &EnvelopeTrace, snr_db: f64) -> f64 {
    trace.rms() / 10f64.powf(snr_db / 20.0)
}

/// Amplitude path from one radar's two TX antennas to the IRS detector.
/// Received amplitude is `A * gain_k * (1 m / d_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarLink {
    pub tx_distance: [f64; 2],
    pub tx_gain: [f64; 2],
}

impl RadarLink {
    pub fn at_distance(d: f64) -> Self {
        Self { tx_distance: [d, d], tx_gain: [1.0, DEFAULT_TX2_GAIN] }
    }

    pub fn from_geometry(radar: &RadarSite, irs: Point2, tx_gain: [f64; 2]) -> Self {
        Self { tx_distance: [radar.tx[0].distance(&irs), radar.tx[1].distance(&irs)], tx_gain }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx_distance.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::DegenerateGeometry("radar TX to IRS distance must be > 0".into()));
        }
        if self.tx_gain.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter("TX gains must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn amplitude(&self, antenna: TxAntenna, tx_amplitude: f64) -> f64 {
        let k = antenna.index();
        tx_amplitude * self.tx_gain[k] / self.tx_distance[k]
    }
}

/// One radar's transmission as seen by the IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub plan: RadarTxPlan,
    pub link: RadarLink,
    pub start: f64,
}

/// IRS receive chain: envelope detector simulated at `mcu_rate * oversample`
/// and sampled by the MCU at `mcu_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrsFrontEnd {
    pub mcu_rate: f64,
    pub oversample: usize,
    pub v_diode: f64,
    pub rc: f64,
}

impl Default for IrsFrontEnd {
    fn default() -> Self {
        Self {
            mcu_rate: DEFAULT_MCU_RATE_HZ,
            oversample: 16,
            v_diode: 0.05,
            rc: default_rc_seconds(DEFAULT_MAX_SWITCHING_HZ),
        }
    }
}

impl IrsFrontEnd {
    /// Noiseless MCU trace of the summed radar amplitudes over `[0, duration)`.
    pub fn receive(&self, txs: &[Transmission], duration: f64) -> Result<EnvelopeTrace> {
        if !(self.mcu_rate > 0.0) || self.oversample == 0 || !(duration >= 0.0) {
            return Err(Error::InvalidParameter("front end rates / duration".into()));
        }
        let mut schedules = Vec::with_capacity(txs.len());
        for tx in txs {
            tx.link.validate()?;
            schedules.push((encode_radar_bits(&tx.plan)?, tx));
        }
        let fs = self.mcu_rate * self.oversample as f64;
        let n = (duration * fs).floor() as usize;
        let input: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = k as f64 / fs;
                let mut a = 0.0;
                for (segs, tx) in &schedules {
                    let tau = t - tx.start;
                    if tau < 0.0 {
                        continue;
                    }
                    let idx = (tau * tx.plan.f).floor() as usize;
                    if let Some(s) = segs.get(idx) {
                        a += tx.link.amplitude(s.antenna, s.amplitude);
                    }
                }
                (t, a)
            })
            .collect();
        let env = envelope_detect(&input, self.v_diode, self.rc)?;
        let samples = env.iter().step_by(self.oversample).map(|&(_, v)| v).collect();
        Ok(EnvelopeTrace { samples, t0: 0.0, sample_rate: self.mcu_rate })
    }
}

/// Monte-Carlo setup for radar-to-IRS bit error rate against distance.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBerSetup {
    pub f: f64,
    pub n_r: u32,
    pub a0: f64,
    pub a1: f64,
    pub noise_sigma: f64,
    pub packets: usize,
    pub front_end: IrsFrontEnd,
    pub format: PacketFormat,
    pub sync: SyncConfig,
}

/// Payload BER at each distance. Packet `i` uses the same payload and noise
/// realisation at every distance so trends are not masked by sampling noise.
/// A packet that fails to synchronise counts as half its payload bits wrong.
pub fn ber_vs_distance(setup: &LinkBerSetup, distances: &[f64], seed: u64) -> Result<Vec<f64>> {
    let timing = BitTiming { f: setup.f, n_r: setup.n_r };
    let lead = 0.5;
    distances
        .iter()
        .map(|&d| {
            let mut errors = 0.0;
            for i in 0..setup.packets {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                let payload: Vec<bool> = (0..PAYLOAD_BITS).map(|_| rng.random()).collect();
                let bits = setup.format.frame(&payload)?;
                let plan = RadarTxPlan::new(setup.f, setup.n_r, setup.a0, setup.a1, bits);
                let dur = lead + plan.duration() + 2.0 * plan.bit_seconds();
                let tx = Transmission { plan, link: RadarLink::at_distance(d), start: lead };
                let mut trace = setup.front_end.receive(&[tx], dur)?;
                trace.add_noise(setup.noise_sigma, &mut rng);
                let prefix = setup.format.prefix();
                let got = sync_align(&trace, &timing, &prefix, &setup.sync)
                    .and_then(|off| decode_bits(&trace.skip(off), &timing, &prefix));
                match got {
                    Ok(rx) if rx.len() >= setup.format.packet_len() => {
                        let p0 = prefix.len();
                        errors += payload.iter().zip(&rx[p0..]).filter(|(a, b)| a != b).count() as f64;
                    }
                    _ => errors += PAYLOAD_BITS as f64 / 2.0,
                }
            }
            Ok(errors / (setup.packets * PAYLOAD_BITS) as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_follows_schedule() {
        let fe = IrsFrontEnd { v_diode: 0.0, ..IrsFrontEnd::default() };
        let plan = RadarTxPlan::new(2.0, 1, 0.3, 1.0, vec![true, false]);
        let link = RadarLink { tx_distance: [1.0, 2.0], tx_gain: [1.0, 1.0] };
        let tr = fe.receive(&[Transmission { plan, link, start: 0.0 }], 2.5).unwrap();
        assert_eq!(tr.len(), 160);
        // Settled mid-segment levels: TX1 at 1 m, TX2 at 2 m.
        assert!((tr.samples[16] - 1.0).abs() < 1e-6);
        assert!((tr.samples[48] - 0.5).abs() < 1e-6);
        assert!((tr.samples[80] - 0.3).abs() < 1e-6);
        assert!((tr.samples[112] - 0.15).abs() < 1e-6);
        assert!(tr.samples[150] < 1e-6);
    }

    #[test]
    fn geometry_link() {
        let r = RadarSite::new(0, Point2::new(0.0, 0.0), 0.0, 0.0125);
        let l = RadarLink::from_geometry(&r, Point2::new(2.0, 0.0), [1.0, 0.7]);
        assert!((l.tx_distance[0] - 2.0).abs() < 0.01);
        assert!((l.tx_distance[0] - l.tx_distance[1]).abs() < 1e-9);
        assert!((l.amplitude(TxAntenna::Tx2, 1.0) / l.amplitude(TxAntenna::Tx1, 1.0) - 0.7).abs() < 1e-9);
    }
}
