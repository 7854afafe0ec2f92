use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap_angle;

use super::{IrsMode, IrsState};

/// Number of radiating elements on the Van Atta board.
pub const VAA_ELEMENTS: usize = 6;

/// Normalised uniform array factor `|sin(N psi / 2) / (N sin(psi / 2))|`.
pub fn array_factor(n: usize, psi: f64) -> f64 {
    let nf = n as f64;
    let den = nf * (psi / 2.0).sin();
    if den.abs() < 1e-12 {
        return 1.0;
    }
    ((nf * psi / 2.0).sin() / den).abs()
}

/// Amplitude gain of the IRS for a wave arriving from `incident` and leaving
/// towards `outgoing`, both measured from the board normal in radians.
///
/// The board favours a deflection `|outgoing - incident|` equal to the
/// configured angle (zero for retro); the deviation from it drives a six
/// element array factor at half-wavelength pitch. Symmetric in the two
/// arguments, zero when off.
pub fn reflect_gain(state: &IrsState, incident: f64, outgoing: f64) -> f64 {
    let target = match state.mode {
        IrsMode::Off => return 0.0,
        IrsMode::Retro => 0.0,
        IrsMode::Reflect(a) => a.radians(),
    };
    let deflection = wrap_angle(outgoing - incident).abs();
    let delta = deflection - target;
    array_factor(VAA_ELEMENTS, PI * delta.sin())
}

/// Element pairing and per-element line phase delays of a Van Atta array with
/// half-wavelength pitch. Element `n` re-radiates what element `partner[n]`
/// received, lagged by `delays[n]` radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VaaPairing {
    pub partner: Vec<usize>,
    pub delays: Vec<f64>,
}

impl VaaPairing {
    /// Mirror pairing (`n <-> N-1-n`) with a linear delay gradient `delta` per
    /// element. `delta = 0` is the plain retro-reflector.
    pub fn mirror(n: usize, delta: f64) -> Self {
        let c = (n as f64 - 1.0) / 2.0;
        Self {
            partner: (0..n).map(|i| n - 1 - i).collect(),
            delays: (0..n).map(|i| delta * (i as f64 - c)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    fn validate(&self) -> Result<()> {
        let n = self.partner.len();
        if n < 2 || self.delays.len() != n {
            return Err(Error::InvalidParameter("pairing needs >= 2 elements and one delay each".into()));
        }
        for (i, &p) in self.partner.iter().enumerate() {
            if p >= n || self.partner[p] != i {
                return Err(Error::InvalidParameter(format!("element {i} is not in a pair")));
            }
        }
        if self.delays.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite("pairing delay"));
        }
        Ok(())
    }
}

/// Outgoing direction (radians from normal) at which the re-radiated phases
/// line up, for a wave arriving from `incident`.
///
/// With element positions `x_n` in wavelengths, element `n` carries phase
/// `2pi x_partner sin(incident) - delay_n + 2pi x_n sin(out)`. The returned
/// direction is the least-squares linear phase fit, which is exact for mirror
/// pairings with linear delays: `sin(out) = sin(incident) + delta / pi`.
pub fn steering_angle_from_pairing(pairing: &VaaPairing, incident: f64) -> Result<f64> {
    pairing.validate()?;
    let n = pairing.len();
    let c = (n as f64 - 1.0) / 2.0;
    let u: Vec<f64> = (0..n).map(|i| PI * (i as f64 - c)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| pairing.delays[i] - u[pairing.partner[i]] * incident.sin())
        .collect();
    let mu = u.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = u.iter().zip(&y).map(|(a, b)| (a - mu) * (b - my)).sum();
    let sxx: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    let s = sxy / sxx;
    Ok(s.clamp(-1.0, 1.0).asin())
}
