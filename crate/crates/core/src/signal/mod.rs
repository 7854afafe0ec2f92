//! FMCW waveform model, beat-signal synthesis and the range / range-Doppler
//! transforms used by the radar side of the link.
//!
//! Everything here runs on complex baseband after the mixer: the 24 GHz
//! carrier is never sampled. A return that travels a round-trip path of
//! length `L` shows up in the beat signal as a tone at `beta * L / c` plus its
//! Doppler offset `2 v / lambda`, with a carrier phase of `2 pi f0 L / c`.

mod channel;
mod spectrum;
mod synth;

pub use channel::{free_space_amplitude, noise_power_for_snr};
pub use spectrum::{range_doppler, range_fft, range_fft_complex, RangeDopplerMap, RangeSpectrum, RdPeak};
pub use synth::{synthesize_array_frames, synthesize_beat_frame};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation speed used throughout the crate, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// FMCW waveform parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChirpConfig {
    /// Chirp start frequency, Hz.
    pub f0: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
    /// Chirp duration, s. Chirps are transmitted back to back.
    pub chirp_duration: f64,
    /// Complex baseband sample rate of the beat signal, Hz.
    pub sample_rate: f64,
    pub chirps_per_slot: usize,
    pub amplitude: f64,
}

impl Default for ChirpConfig {
    /// 24 GHz radar, 250 MHz sweep, 256 us chirps, 32 beat samples per chirp.
    fn default() -> Self {
        Self {
            f0: 24.0e9,
            bandwidth: 250.0e6,
            chirp_duration: 256.0e-6,
            sample_rate: 125.0e3,
            chirps_per_slot: 8,
            amplitude: 1.0,
        }
    }
}

impl ChirpConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.f0, self.bandwidth, self.chirp_duration, self.sample_rate, self.amplitude]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidChirp("non-finite field".into()));
        }
        if self.f0 <= 0.0 || self.bandwidth <= 0.0 || self.chirp_duration <= 0.0 || self.sample_rate <= 0.0 {
            return Err(Error::InvalidChirp("f0, bandwidth, chirp_duration and sample_rate must be positive".into()));
        }
        if self.samples_per_chirp() < 2 {
            return Err(Error::InvalidChirp("fewer than 2 samples per chirp".into()));
        }
        if self.chirps_per_slot == 0 {
            return Err(Error::InvalidChirp("chirps_per_slot must be at least 1".into()));
        }
        Ok(())
    }

    /// Checks the beat-signal Nyquist condition for a maximum one-way range.
    pub fn validate_for_range(&self, max_range: f64) -> Result<()> {
        self.validate()?;
        let f_max = self.slope() * 2.0 * max_range / SPEED_OF_LIGHT;
        if self.sample_rate < 2.0 * f_max {
            return Err(Error::InvalidChirp(format!(
                "sample rate {} Hz below 2 x beat frequency {} Hz at {} m",
                self.sample_rate, f_max, max_range
            )));
        }
        Ok(())
    }

    /// Sweep slope beta = B / T_chirp, Hz/s.
    pub fn slope(&self) -> f64 {
        self.bandwidth / self.chirp_duration
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0
    }

    pub fn samples_per_chirp(&self) -> usize {
        (self.sample_rate * self.chirp_duration).round() as usize
    }

    /// One-way range resolution c / 2B.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }

    /// Largest one-way range whose beat tone stays below `sample_rate`.
    pub fn max_unambiguous_range(&self) -> f64 {
        self.sample_rate * SPEED_OF_LIGHT / (2.0 * self.slope())
    }

    /// Beat frequency produced by a one-way range `r`.
    pub fn beat_for_range(&self, r: f64) -> f64 {
        beat_frequency(self, 2.0 * r)
    }
}

/// Beat frequency for a round-trip path length (already out-and-back).
pub fn beat_frequency(cfg: &ChirpConfig, path_length_round_trip: f64) -> f64 {
    cfg.slope() * path_length_round_trip / SPEED_OF_LIGHT
}

/// Doppler shift 2v/lambda for a radial velocity, closing positive.
pub fn doppler_shift(cfg: &ChirpConfig, v: f64) -> f64 {
    2.0 * v / cfg.wavelength()
}

/// One dechirped chirp of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<num_complex::Complex64>,
    /// Frame start time, s.
    pub t0: f64,
    pub chirp_index: usize,
}

impl IqFrame {
    pub fn zeros(cfg: &ChirpConfig, chirp_index: usize) -> Self {
        Self {
            samples: vec![num_complex::Complex64::new(0.0, 0.0); cfg.samples_per_chirp()],
            t0: chirp_index as f64 * cfg.chirp_duration,
            chirp_index,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A single propagation path as seen by the radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEcho {
    /// Full out-and-back path length, m.
    pub total_path_length: f64,
    /// Linear amplitude at the receiver.
    pub gain: f64,
    /// Radial velocity of the path length, m/s, closing positive.
    pub doppler_velocity: f64,
    /// Angle of arrival relative to the array boresight, rad.
    #[serde(default)]
    pub aoa: f64,
}

impl PathEcho {
    pub fn new(total_path_length: f64, gain: f64) -> Self {
        Self { total_path_length, gain, doppler_velocity: 0.0, aoa: 0.0 }
    }

    /// Echo from a point at one-way range `r`.
    pub fn at_range(r: f64, gain: f64) -> Self {
        Self::new(2.0 * r, gain)
    }

    pub fn with_velocity(mut self, v: f64) -> Self {
        self.doppler_velocity = v;
        self
    }

    pub fn with_aoa(mut self, aoa: f64) -> Self {
        self.aoa = aoa;
        self
    }

    /// Round-trip delay tau.
    pub fn delay(&self) -> f64 {
        self.total_path_length / SPEED_OF_LIGHT
    }

    /// One-way equivalent range (half the total path).
    pub fn range(&self) -> f64 {
        self.total_path_length / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_path_length.is_finite() && self.gain.is_finite() && self.doppler_velocity.is_finite() && self.aoa.is_finite()) {
            return Err(Error::NonFinite("path echo"));
        }
        if self.total_path_length < 0.0 || self.gain < 0.0 {
            return Err(Error::InvalidParameter("path length and gain must be non-negative".into()));
        }
        Ok(())
    }
}
