use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irs::IrsState;
use crate::signal::{range_fft, ChirpConfig, IqFrame};

/// IRS state for each symbol slot: retro-reflecting for `1`, off for `0`.
pub fn ook_modulate(irs_id: u8, bits: &[bool]) -> Vec<IrsState> {
    bits.iter().map(|&b| IrsState::new(irs_id).with_ook_bit(b)).collect()
}

/// Range-FFT magnitude at `range` for every chirp.
pub fn chirp_magnitudes_at_range(frames: &[IqFrame], cfg: &ChirpConfig, range: f64) -> Result<Vec<f64>> {
    frames
        .iter()
        .map(|f| {
            let s = range_fft(f, cfg)?;
            let bin = s.bin_of_range(range).min(s.magnitudes.len().saturating_sub(1));
            Ok(s.magnitudes.get(bin).copied().unwrap_or(0.0))
        })
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median of each group of `chirps_per_symbol` magnitudes.
pub fn slot_levels(magnitudes: &[f64], chirps_per_symbol: usize) -> Result<Vec<f64>> {
    if chirps_per_symbol == 0 {
        return Err(Error::InvalidParameter("chirps per symbol must be >= 1".into()));
    }
    Ok(magnitudes.chunks_exact(chirps_per_symbol).map(|c| median(&mut c.to_vec())).collect())
}

/// Echo levels of the IRS in its on and off states at the radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OokLevels {
    pub on: f64,
    pub off: f64,
}

impl OokLevels {
    /// Mean slot level over the known `1` and `0` symbols of a training run.
    pub fn train(levels: &[f64], known: &[bool]) -> Result<Self> {
        let pick = |want: bool| {
            let v: Vec<f64> = levels.iter().zip(known).filter(|(_, &b)| b == want).map(|(l, _)| *l).collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        match (pick(true), pick(false)) {
            (Some(on), Some(off)) if on > off => Ok(Self { on, off }),
            _ => Err(Error::CalibrationRequired),
        }
    }

    pub fn threshold(&self) -> f64 {
        0.5 * (self.on + self.off)
    }
}

/// Symbols from per-chirp IRS-bin magnitudes: the per-slot median compared
/// with the midpoint of trained on/off levels.
pub fn ook_demodulate(magnitudes: &[f64], chirps_per_symbol: usize, levels: Option<&OokLevels>) -> Result<Vec<bool>> {
    let levels = levels.ok_or(Error::CalibrationRequired)?;
    let th = levels.threshold();
    Ok(slot_levels(magnitudes, chirps_per_symbol)?.into_iter().map(|l| l > th).collect())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::irs::IrsMode;
    use crate::signal::{noise_power_for_snr, synthesize_beat_frame, PathEcho};

    fn chirps(bits: &[bool], snr_db: f64, seed: u64) -> (ChirpConfig, Vec<f64>) {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let irs = PathEcho::at_range(1.0, 1.0);
        let wall = PathEcho::at_range(4.2, 0.3);
        let noise = noise_power_for_snr(&[irs], snr_db);
        let mut frames = Vec::new();
        let mut k = 0;
        for st in ook_modulate(3, bits) {
            let mut echoes = vec![wall];
            if st.mode == IrsMode::Retro {
                echoes.push(irs);
            }
            for _ in 0..cfg.chirps_per_slot {
                frames.push(synthesize_beat_frame(&cfg, &echoes, noise, k, &mut rng).unwrap());
                k += 1;
            }
        }
        let m = chirp_magnitudes_at_range(&frames, &cfg, 1.0).unwrap();
        (cfg, m)
    }

    #[test]
    fn one_zero_visibility() {
        let (cfg, m) = chirps(&[true, false], 60.0, 1);
        let l = slot_levels(&m, cfg.chirps_per_slot).unwrap();
        assert!(l[0] > 0.5 && l[1] < 0.05, "{l:?}");
        let (cfg, m) = chirps(&[false, false, false], 60.0, 1);
        assert!(slot_levels(&m, cfg.chirps_per_slot).unwrap().iter().all(|&v| v < 0.05));
    }

    #[test]
    fn untrained_needs_calibration() {
        assert!(matches!(ook_demodulate(&[1.0; 8], 8, None), Err(Error::CalibrationRequired)));
        assert!(matches!(OokLevels::train(&[1.0, 1.0], &[true, true]), Err(Error::CalibrationRequired)));
    }

    #[test]
    fn id_broadcast_round_trip_at_30_db() {
        use crate::comms::{frame_packet, payload_from_u8};
        let packet = frame_packet(&payload_from_u8(0b000011)).unwrap();
        let prefix_len = 5;
        for seed in 0..20 {
            let (cfg, m) = chirps(&packet, 30.0, seed);
            let levels = slot_levels(&m, cfg.chirps_per_slot).unwrap();
            let trained = OokLevels::train(&levels[..prefix_len], &packet[..prefix_len]).unwrap();
            let rx = ook_demodulate(&m, cfg.chirps_per_slot, Some(&trained)).unwrap();
            assert_eq!(rx, packet);
        }
    }
}
