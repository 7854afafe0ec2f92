//! Slot-level super-frame layout and adaptive angle-of-interest scheduling.
//!
//! Slots are the time unit throughout; seconds appear only through
//! `slot_seconds` at the boundary.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irs::ReflectionAngle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetDetection {
    pub angle: ReflectionAngle,
    /// One-way-equivalent range at the radar, m.
    pub range: f64,
    /// Linear reflection magnitude.
    pub energy: f64,
    /// Speed, m/s.
    pub velocity: f64,
}

/// Scanning angles with their sensing durations in slots, ordered by angle.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AngleDurationSet {
    entries: Vec<(ReflectionAngle, u32)>,
}

impl AngleDurationSet {
    pub fn new(entries: Vec<(ReflectionAngle, u32)>) -> Result<Self> {
        let mut seen = [false; 4];
        for &(a, d) in &entries {
            if d == 0 {
                return Err(Error::InvalidParameter(format!("zero duration for {a}")));
            }
            if std::mem::replace(&mut seen[a.index()], true) {
                return Err(Error::InvalidParameter(format!("duplicate angle {a}")));
            }
        }
        Ok(Self { entries })
    }

    /// Every supported angle with the same duration.
    pub fn uniform(slots: u32) -> Result<Self> {
        Self::new(ReflectionAngle::ALL.iter().map(|&a| (a, slots)).collect())
    }

    pub fn entries(&self) -> &[(ReflectionAngle, u32)] {
        &self.entries
    }

    pub fn angles(&self) -> impl Iterator<Item = ReflectionAngle> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn duration(&self, angle: ReflectionAngle) -> Option<u32> {
        self.entries.iter().find(|e| e.0 == angle).map(|e| e.1)
    }

    pub fn contains(&self, angle: ReflectionAngle) -> bool {
        self.duration(angle).is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Total sensing slots.
    pub fn d_scan(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubFrame {
    pub angle: ReflectionAngle,
    pub comm_slots: u32,
    pub sensing_slots: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SuperFrame {
    /// Leading radar-to-IRS slot carrying the AoI packet.
    pub radar_to_irs_slot: bool,
    pub subframes: Vec<SubFrame>,
}

impl SuperFrame {
    pub fn total_slots(&self) -> u32 {
        u32::from(self.radar_to_irs_slot) + self.subframes.iter().map(|s| s.comm_slots + s.sensing_slots).sum::<u32>()
    }
}

/// One subframe per angle in the given order: a comm slot then `slots` sensing
/// slots.
pub fn naive_superframe(angles: &[ReflectionAngle], slots: u32) -> Result<SuperFrame> {
    if angles.is_empty() || slots == 0 {
        return Err(Error::InvalidParameter("naive frame needs angles and >= 1 slot".into()));
    }
    Ok(SuperFrame {
        radar_to_irs_slot: false,
        subframes: angles.iter().map(|&angle| SubFrame { angle, comm_slots: 1, sensing_slots: slots }).collect(),
    })
}

/// Radar-to-IRS slot followed by one subframe per scheduled angle.
pub fn adaptive_superframe(set: &AngleDurationSet) -> SuperFrame {
    SuperFrame {
        radar_to_irs_slot: true,
        subframes: set
            .entries()
            .iter()
            .map(|&(angle, d)| SubFrame { angle, comm_slots: 1, sensing_slots: d })
            .collect(),
    }
}

pub fn scanning_time(sf: &SuperFrame, slot_seconds: f64) -> Result<f64> {
    if !(slot_seconds > 0.0) || !slot_seconds.is_finite() {
        return Err(Error::InvalidParameter(format!("slot_seconds {slot_seconds}")));
    }
    Ok(sf.total_slots() as f64 * slot_seconds)
}

/// Which way the range ratio scales a detection's minimum duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioOrientation {
    /// `(r_i / r_ref)^4`: farther, weaker targets get more slots.
    #[default]
    SnrCompensating,
    /// `(r_ref / r_i)^4`: nearer targets get more slots.
    ReferenceOverRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AoiParams {
    /// Angular spacing of reflection angles, deg.
    pub delta_alpha_deg: f64,
    /// Sensing slots for the strongest target.
    pub max_energy_slots: u32,
    pub slot_seconds: f64,
    #[serde(default)]
    pub orientation: RatioOrientation,
}

impl Default for AoiParams {
    fn default() -> Self {
        Self { delta_alpha_deg: 15.0, max_energy_slots: 9, slot_seconds: 0.1625, orientation: RatioOrientation::default() }
    }
}

impl AoiParams {
    fn validate(&self) -> Result<()> {
        if !(self.delta_alpha_deg > 0.0) || self.max_energy_slots == 0 || !(self.slot_seconds > 0.0) {
            return Err(Error::InvalidParameter(
                "need delta_alpha > 0, max_energy_slots >= 1, slot_seconds > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Arc length a target may cover during one scan without leaving its beam.
pub fn speed_bound(delta_alpha_deg: f64, r_max_speed: f64) -> f64 {
    delta_alpha_deg / 180.0 * PI * r_max_speed
}

/// `v_max * d_scan * slot_seconds < (delta_alpha / 180) * pi * r_max_speed`.
pub fn speed_constraint_holds(v_max: f64, d_scan: u32, slot_seconds: f64, delta_alpha_deg: f64, r_max_speed: f64) -> bool {
    v_max * d_scan as f64 * slot_seconds < speed_bound(delta_alpha_deg, r_max_speed)
}

/// Largest `d_scan` that still satisfies the speed constraint.
fn max_feasible_d_scan(v_max: f64, slot_seconds: f64, bound: f64) -> u32 {
    let limit = bound / (v_max * slot_seconds);
    let mut d = (limit.ceil() - 1.0).max(0.0) as u32;
    while d > 0 && !(v_max * d as f64 * slot_seconds < bound) {
        d -= 1;
    }
    d
}

/// The strongest detection; equal energies go to the nearer target.
fn reference(detections: &[TargetDetection]) -> &TargetDetection {
    detections
        .iter()
        .reduce(|best, d| {
            if d.energy > best.energy || (d.energy == best.energy && d.range < best.range) {
                d
            } else {
                best
            }
        })
        .expect("non-empty")
}

/// Angles carrying more than one detection.
pub fn crowded_angles(detections: &[TargetDetection]) -> Vec<ReflectionAngle> {
    let mut count: BTreeMap<ReflectionAngle, usize> = BTreeMap::new();
    for d in detections {
        *count.entry(d.angle).or_default() += 1;
    }
    count.into_iter().filter(|&(_, n)| n > 1).map(|(a, _)| a).collect()
}

/// Next scanning set from this round's detections.
///
/// Empty detections return `prev` unchanged. Otherwise each detected angle
/// gets `ceil(ratio^4 * max_energy_slots)` slots, the ratio taken against the
/// strongest detection's range, and the total must satisfy the speed
/// constraint for the fastest detection. Angles with several detections keep
/// the largest duration.
pub fn build_aoi(detections: &[TargetDetection], prev: &AngleDurationSet, p: &AoiParams) -> Result<AngleDurationSet> {
    p.validate()?;
    if detections.is_empty() {
        return Ok(prev.clone());
    }
    for d in detections {
        if !(d.range > 0.0) || !(d.energy >= 0.0) || !d.velocity.is_finite() || !d.range.is_finite() {
            return Err(Error::InvalidParameter(format!("bad detection {d:?}")));
        }
    }
    let r_ref = reference(detections).range;
    let mut per_angle: BTreeMap<ReflectionAngle, u32> = BTreeMap::new();
    for d in detections {
        let ratio = match p.orientation {
            RatioOrientation::SnrCompensating => d.range / r_ref,
            RatioOrientation::ReferenceOverRange => r_ref / d.range,
        };
        let raw = ratio.powi(4) * p.max_energy_slots as f64;
        // Values within rounding noise of an integer are not bumped up.
        let slots = ((raw - 1e-9).ceil() as u32).max(1);
        let e = per_angle.entry(d.angle).or_insert(0);
        *e = (*e).max(slots);
    }
    let set = AngleDurationSet::new(per_angle.into_iter().collect())?;

    let fastest = detections
        .iter()
        .reduce(|a, b| if b.velocity.abs() > a.velocity.abs() { b } else { a })
        .expect("non-empty");
    let v_max = fastest.velocity.abs();
    if v_max > 0.0 {
        let bound = speed_bound(p.delta_alpha_deg, fastest.range);
        if !speed_constraint_holds(v_max, set.d_scan(), p.slot_seconds, p.delta_alpha_deg, fastest.range) {
            return Err(Error::InfeasibleSchedule {
                max_feasible_d_scan: max_feasible_d_scan(v_max, p.slot_seconds, bound),
                required: set.d_scan(),
            });
        }
    }
    Ok(set)
}

/// Slot duration that makes `naive_slots` last `baseline_seconds`.
pub fn calibrate_slot_seconds(naive_slots: u32, baseline_seconds: f64) -> Result<f64> {
    if naive_slots == 0 || !(baseline_seconds > 0.0) {
        return Err(Error::InvalidParameter("calibration needs slots and a positive baseline".into()));
    }
    Ok(baseline_seconds / naive_slots as f64)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use ReflectionAngle::*;

    fn det(angle: ReflectionAngle, range: f64, energy: f64, velocity: f64) -> TargetDetection {
        TargetDetection { angle, range, energy, velocity }
    }

    fn params(d_max: u32) -> AoiParams {
        AoiParams { delta_alpha_deg: 15.0, max_energy_slots: d_max, slot_seconds: 0.1, orientation: RatioOrientation::SnrCompensating }
    }

    #[test]
    fn naive_frame_layout() {
        let sf = naive_superframe(&ReflectionAngle::ALL, 10).unwrap();
        assert_eq!(sf.subframes.len(), 4);
        assert_eq!(sf.total_slots(), 44);
        let order: Vec<_> = sf.subframes.iter().map(|s| s.angle).collect();
        assert_eq!(order, ReflectionAngle::ALL);
        let one = naive_superframe(&[Deg60], 1).unwrap();
        assert_eq!(one.total_slots(), 2);
        let rev = naive_superframe(&[Deg75, Deg30], 3).unwrap();
        assert_eq!(rev.subframes[0].angle, Deg75);
    }

    #[test]
    fn scanning_time_examples() {
        assert_eq!(scanning_time(&SuperFrame::default(), 0.2).unwrap(), 0.0);
        let naive = naive_superframe(&ReflectionAngle::ALL, 10).unwrap();
        let single = adaptive_superframe(&AngleDurationSet::new(vec![(Deg45, 10)]).unwrap());
        assert!(scanning_time(&single, 0.1).unwrap() < scanning_time(&naive, 0.1).unwrap());
        assert!(scanning_time(&naive, 0.0).is_err());
    }

    #[test]
    fn passthrough() {
        let prev = AngleDurationSet::new(vec![(Deg30, 10)]).unwrap();
        assert_eq!(build_aoi(&[], &prev, &params(4)).unwrap(), prev);
    }

    #[test]
    fn reference_target_gets_d_max() {
        let s = build_aoi(&[det(Deg45, 2.0, 1.0, 0.0)], &AngleDurationSet::default(), &params(4)).unwrap();
        assert_eq!(s.entries(), &[(Deg45, 4)]);
    }

    #[test]
    fn far_target_gets_ratio_slots() {
        let d = [det(Deg30, 2.0, 1.0, 0.0), det(Deg60, 2.83, 0.25, 0.0)];
        let s = build_aoi(&d, &AngleDurationSet::default(), &params(4)).unwrap();
        let oracle = ((2.83f64 / 2.0).powi(4) * 4.0).ceil() as u32;
        assert_eq!(oracle, 17);
        assert_eq!(s.entries(), &[(Deg30, 4), (Deg60, 17)]);
        assert_eq!(s.d_scan(), 21);
    }

    #[test]
    fn literal_orientation_shrinks_far_target() {
        let mut p = params(4);
        p.orientation = RatioOrientation::ReferenceOverRange;
        let d = [det(Deg30, 2.0, 1.0, 0.0), det(Deg60, 2.83, 0.25, 0.0)];
        let s = build_aoi(&d, &AngleDurationSet::default(), &p).unwrap();
        assert_eq!(s.entries(), &[(Deg30, 4), (Deg60, 1)]);
    }

    #[test]
    fn speed_bound_example() {
        assert!(speed_constraint_holds(1.0, 7, 0.1, 15.0, 3.0));
        assert!(!speed_constraint_holds(1.0, 8, 0.1, 15.0, 3.0));
        assert_eq!(max_feasible_d_scan(1.0, 0.1, speed_bound(15.0, 3.0)), 7);
        let d = [det(Deg45, 3.0, 1.0, 1.0)];
        let err = build_aoi(&d, &AngleDurationSet::default(), &params(9)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSchedule { max_feasible_d_scan: 7, required: 9 }));
        assert!(build_aoi(&d, &AngleDurationSet::default(), &params(7)).is_ok());
    }

    #[test]
    fn energy_tie_prefers_nearer() {
        let d = [det(Deg30, 3.0, 1.0, 0.0), det(Deg45, 2.0, 1.0, 0.0)];
        let s = build_aoi(&d, &AngleDurationSet::default(), &params(2)).unwrap();
        assert_eq!(s.duration(Deg45), Some(2));
        assert_eq!(s.duration(Deg30), Some(((1.5f64).powi(4) * 2.0).ceil() as u32));
    }

    #[test]
    fn crowded_angle_keeps_max() {
        let d = [det(Deg30, 2.0, 1.0, 0.0), det(Deg30, 2.5, 0.4, 0.0)];
        assert_eq!(crowded_angles(&d), [Deg30]);
        let s = build_aoi(&d, &AngleDurationSet::default(), &params(2)).unwrap();
        assert_eq!(s.entries(), &[(Deg30, ((1.25f64).powi(4) * 2.0).ceil() as u32)]);
    }

    #[test]
    fn set_rejects_duplicates_and_zero() {
        assert!(AngleDurationSet::new(vec![(Deg30, 1), (Deg30, 2)]).is_err());
        assert!(AngleDurationSet::new(vec![(Deg30, 0)]).is_err());
    }

    fn detections() -> impl Strategy<Value = Vec<TargetDetection>> {
        // Energies follow the radar equation for equal reflectivity.
        proptest::collection::vec((0usize..4, 1.0f64..4.0, 0.0f64..1.0), 1..5).prop_map(|v| {
            v.into_iter()
                .map(|(a, r, s)| det(ReflectionAngle::ALL[a], r, r.powi(-4), s))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn only_detected_angles(ds in detections(), d_max in 1u32..6) {
            let p = AoiParams { slot_seconds: 1e-4, ..params(d_max) };
            let s = build_aoi(&ds, &AngleDurationSet::uniform(3).unwrap(), &p).unwrap();
            for a in s.angles() {
                prop_assert!(ds.iter().any(|d| d.angle == a));
            }
            for d in &ds {
                prop_assert!(s.contains(d.angle));
            }
        }

        #[test]
        fn reference_duration_is_minimum(ds in detections(), d_max in 1u32..6) {
            let p = AoiParams { slot_seconds: 1e-4, ..params(d_max) };
            let s = build_aoi(&ds, &AngleDurationSet::default(), &p).unwrap();
            let r = reference(&ds);
            let dr = s.duration(r.angle).unwrap();
            prop_assert!(s.entries().iter().all(|e| e.1 >= d_max));
            prop_assert!(dr >= d_max);
            if crowded_angles(&ds).is_empty() {
                prop_assert_eq!(dr, d_max);
            }
        }

        #[test]
        fn removing_a_detection_never_grows_scan(ds in detections(), d_max in 1u32..6, drop in 0usize..5) {
            prop_assume!(ds.len() > 1);
            let p = AoiParams { slot_seconds: 1e-4, ..params(d_max) };
            let full = build_aoi(&ds, &AngleDurationSet::default(), &p).unwrap();
            let mut fewer = ds.clone();
            fewer.remove(drop % ds.len());
            let less = build_aoi(&fewer, &AngleDurationSet::default(), &p).unwrap();
            prop_assert!(less.d_scan() <= full.d_scan());
        }

        #[test]
        fn emitted_schedules_satisfy_speed_bound(ds in detections(), d_max in 1u32..12, slot in 0.01f64..0.3) {
            let p = AoiParams { slot_seconds: slot, ..params(d_max) };
            if let Ok(s) = build_aoi(&ds, &AngleDurationSet::default(), &p) {
                let f = ds.iter().reduce(|a, b| if b.velocity.abs() > a.velocity.abs() { b } else { a }).unwrap();
                let v = f.velocity.abs();
                prop_assert!(v == 0.0 || v * s.d_scan() as f64 * slot < 15.0 / 180.0 * PI * f.range);
            }
        }
    }
}
