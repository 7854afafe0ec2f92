use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::{beat_frequency, doppler_shift, ChirpConfig, IqFrame, PathEcho, SPEED_OF_LIGHT};

/// Dechirped return of one chirp at a single receive element.
///
/// Each echo contributes `gain * exp(j 2pi (f_b t + f_d (t0 + t)) + j theta)`
/// with `theta = 2pi f0 tau mod 2pi`; the Doppler term runs on absolute time so
/// the phase advances coherently from chirp to chirp. Noise is circular white
/// Gaussian with total power `noise_power`.
pub fn synthesize_beat_frame<R: Rng + ?Sized>(
    cfg: &ChirpConfig,
    echoes: &[PathEcho],
    noise_power: f64,
    chirp_index: usize,
    rng: &mut R,
) -> Result<IqFrame> {
    let mut frames = synthesize_array_frames(cfg, echoes, noise_power, chirp_index, 1, rng)?;
    Ok(frames.remove(0))
}

/// Same as [`synthesize_beat_frame`] for a uniform linear receive array with
/// half-wavelength spacing: element `m` sees an extra `pi m sin(aoa)` phase.
pub fn synthesize_array_frames<R: Rng + ?Sized>(
    cfg: &ChirpConfig,
    echoes: &[PathEcho],
    noise_power: f64,
    chirp_index: usize,
    rx_count: usize,
    rng: &mut R,
) -> Result<Vec<IqFrame>> {
    for e in echoes {
        e.validate()?;
    }
    if !(noise_power >= 0.0) || !noise_power.is_finite() {
        return Err(Error::InvalidParameter(format!("noise power {noise_power}")));
    }
    let n = cfg.samples_per_chirp();
    let t0 = chirp_index as f64 * cfg.chirp_duration;
    let dt = 1.0 / cfg.sample_rate;

    let tones: Vec<(f64, f64, f64, f64, f64)> = echoes
        .iter()
        .map(|e| {
            let fb = beat_frequency(cfg, e.total_path_length);
            let fd = doppler_shift(cfg, e.doppler_velocity);
            let theta = (TAU * cfg.f0 * (e.total_path_length / SPEED_OF_LIGHT)).rem_euclid(TAU);
            (e.gain * cfg.amplitude, fb, fd, theta, PI * e.aoa.sin())
        })
        .collect();

    let sigma = (noise_power / 2.0).sqrt();
    let mut frames = Vec::with_capacity(rx_count);
    for m in 0..rx_count {
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        for &(amp, fb, fd, theta, spatial) in &tones {
            if amp == 0.0 {
                continue;
            }
            let base = theta + TAU * fd * t0 + spatial * m as f64;
            let step = TAU * (fb + fd) * dt;
            for (k, s) in samples.iter_mut().enumerate() {
                *s += Complex64::from_polar(amp, base + step * k as f64);
            }
        }
        if sigma > 0.0 {
            for s in samples.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *s += Complex64::new(re * sigma, im * sigma);
            }
        }
        frames.push(IqFrame { samples, t0, chirp_index });
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn empty_echo_list_is_silent() {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = synthesize_beat_frame(&cfg, &[], 0.0, 0, &mut rng).unwrap();
        assert_eq!(f.len(), 32);
        assert!(f.samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn rejects_non_finite_gain() {
        let cfg = ChirpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = PathEcho::new(2.0, f64::INFINITY);
        assert!(synthesize_beat_frame(&cfg, &[e], 0.0, 0, &mut rng).is_err());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let cfg = ChirpConfig::default();
        let echoes = [PathEcho::at_range(2.0, 1.0)];
        let a = synthesize_beat_frame(&cfg, &echoes, 0.1, 3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = synthesize_beat_frame(&cfg, &echoes, 0.1, 3, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_power_matches_request() {
        let cfg = ChirpConfig { sample_rate: 4.0e6, ..ChirpConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = synthesize_beat_frame(&cfg, &[], 0.25, 0, &mut rng).unwrap();
        let p = f.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / f.len() as f64;
        assert!((p - 0.25).abs() < 0.03, "{p}");
    }

    #[test]
    fn array_phase_progression() {
        let cfg = ChirpConfig::default();
        let aoa = 0.3_f64;
        let e = PathEcho::at_range(1.5, 1.0).with_aoa(aoa);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let frames = synthesize_array_frames(&cfg, &[e], 0.0, 0, 4, &mut rng).unwrap();
        for m in 1..4 {
            let ratio = frames[m].samples[0] / frames[m - 1].samples[0];
            let want = Complex64::from_polar(1.0, PI * aoa.sin());
            assert!((ratio - want).norm() < 1e-12);
        }
    }
}
