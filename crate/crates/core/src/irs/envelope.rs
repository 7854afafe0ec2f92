use crate::error::{Error, Result};

/// RC constant ten times faster than the highest radar modulation frequency.
pub fn default_rc_seconds(f_max: f64) -> f64 {
    1.0 / (10.0 * f_max)
}

/// Diode envelope detector: `max(A - v_diode, 0)` into an RC low-pass.
///
/// `samples` holds `(t, amplitude)` pairs with strictly increasing `t`. The
/// capacitor starts discharged and each sample's input is held over the
/// interval leading up to it, so a unit step reaches `1 - 1/e` at `t = rc`.
/// `rc = 0` returns the rectified input unchanged.
pub fn envelope_detect(samples: &[(f64, f64)], v_diode: f64, rc: f64) -> Result<Vec<(f64, f64)>> {
    if !(rc >= 0.0) || !rc.is_finite() || !v_diode.is_finite() {
        return Err(Error::InvalidParameter(format!("rc {rc}, v_diode {v_diode}")));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut y = 0.0;
    let mut prev_t: Option<f64> = None;
    for &(t, a) in samples {
        if !t.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite("envelope sample"));
        }
        let x = (a - v_diode).max(0.0);
        if rc == 0.0 {
            y = x;
        } else if let Some(pt) = prev_t {
            let dt = t - pt;
            if dt <= 0.0 {
                return Err(Error::InvalidParameter("sample times must increase".into()));
            }
            y += (1.0 - (-dt / rc).exp()) * (x - y);
        }
        prev_t = Some(t);
        out.push((t, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn diode_drop_with_zero_rc() {
        let out = envelope_detect(&[(0.0, 1.0), (1.0, 0.2)], 0.3, 0.0).unwrap();
        assert!((out[0].1 - 0.7).abs() < 1e-12);
        assert_eq!(out[1].1, 0.0);
    }

    #[test]
    fn step_reaches_63_percent_at_tau() {
        let rc = 0.005;
        let dt = rc / 100.0;
        let s: Vec<(f64, f64)> = (0..=300).map(|i| (i as f64 * dt, 1.0)).collect();
        let out = envelope_detect(&s, 0.0, rc).unwrap();
        assert!((out[100].1 - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        assert!((out[100].1 - 0.632).abs() < 1e-3);
    }

    #[test]
    fn default_rc() {
        assert!((default_rc_seconds(20.0) - 0.005).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn monotone_in_input(levels in proptest::collection::vec(0.0f64..2.0, 2..40), bump in 0.0f64..1.0) {
            let a: Vec<(f64, f64)> = levels.iter().enumerate().map(|(i, &v)| (i as f64 * 1e-3, v)).collect();
            let b: Vec<(f64, f64)> = a.iter().map(|&(t, v)| (t, v + bump)).collect();
            let ya = envelope_detect(&a, 0.3, 0.004).unwrap();
            let yb = envelope_detect(&b, 0.3, 0.004).unwrap();
            for (p, q) in ya.iter().zip(&yb) {
                prop_assert!(q.1 >= p.1 - 1e-12);
                prop_assert!(p.1 >= 0.0);
            }
        }
    }
}
