use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::PathEcho;

/// Friis-type amplitude `tx * lambda / (4 pi d)`.
pub fn free_space_amplitude(distance: f64, wavelength: f64, tx_amplitude: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::DegenerateGeometry(format!("free-space distance {distance} m")));
    }
    Ok(tx_amplitude * wavelength / (4.0 * PI * distance))
}

/// Noise power giving `snr_db` relative to the strongest echo in `echoes`.
/// Returns 0 for an empty or all-zero echo list.
pub fn noise_power_for_snr(echoes: &[PathEcho], snr_db: f64) -> f64 {
    let peak = echoes.iter().map(|e| e.gain * e.gain).fold(0.0, f64::max);
    peak / 10f64.powf(snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_distance_law() {
        let a = free_space_amplitude(1.3, 0.0125, 2.0).unwrap();
        let b = free_space_amplitude(2.6, 0.0125, 2.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reference_distance_is_unity() {
        let lambda = 0.0125;
        let a = free_space_amplitude(lambda / (4.0 * PI), lambda, 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_metre_at_24ghz() {
        let a = free_space_amplitude(1.0, 0.0125, 1.0).unwrap();
        assert!((a - 9.947e-4).abs() < 5e-8);
    }

    #[test]
    fn zero_distance_is_degenerate() {
        assert!(matches!(free_space_amplitude(0.0, 0.0125, 1.0), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn snr_reference() {
        let echoes = [PathEcho::new(2.0, 0.5), PathEcho::new(4.0, 2.0)];
        assert!((noise_power_for_snr(&echoes, 20.0) - 0.04).abs() < 1e-15);
        assert_eq!(noise_power_for_snr(&[], 20.0), 0.0);
    }
}
