//! Slot-length calibration against the published scanning times and the
//! three bundled scenes used to check the adaptive scheduler against them.

use serde::Serialize;

use crate::error::Result;
use crate::irs::ReflectionAngle;
use crate::scheduler::{calibrate_slot_seconds, naive_superframe};

use super::config::ScenarioConfig;
use super::engine::run_scenario;

/// Published naive 4-angle scanning time, s.
pub const BASELINE_SECONDS: f64 = 7.15;
/// Published adaptive scanning times, s.
pub const MULTI_TARGET_SECONDS: f64 = 4.13;
pub const SINGLE_TARGET_SECONDS: f64 = 1.80;
/// Allowed overshoot on the published adaptive times.
pub const SLACK: f64 = 1.10;

pub const SINGLE_SCENE: &str = include_str!("../../../../scenarios/table3_single.toml");
pub const MULTI_SCENE: &str = include_str!("../../../../scenarios/table3_multi.toml");
pub const NAIVE_SCENE: &str = include_str!("../../../../scenarios/table3_naive.toml");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Row {
    pub case: &'static str,
    /// Mean scanning time after warm-up, s.
    pub seconds: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3 {
    pub naive_slots: u32,
    pub slot_seconds: f64,
    pub rows: Vec<Table3Row>,
}

impl Table3 {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// Slot length that makes the naive 4-angle superframe last the baseline.
pub fn calibrate(naive_slots_per_angle: u32) -> Result<(u32, f64)> {
    let slots = naive_superframe(&ReflectionAngle::ALL, naive_slots_per_angle)?.total_slots();
    Ok((slots, calibrate_slot_seconds(slots, BASELINE_SECONDS)?))
}

fn mean_scan(text: &str, slot_seconds: f64) -> Result<f64> {
    let mut cfg = ScenarioConfig::from_toml(text)?;
    cfg.scheduler.slot_seconds = slot_seconds;
    let report = run_scenario(&cfg)?;
    Ok(report.mean_scan_time().unwrap_or(f64::NAN))
}

/// Calibrates once on the naive superframe, then runs the naive, multi-target
/// and single-target scenes with that slot length.
pub fn table3() -> Result<Table3> {
    let naive_slots = ScenarioConfig::from_toml(NAIVE_SCENE)?.scheduler.naive_slots;
    let (slots, slot_seconds) = calibrate(naive_slots)?;
    let naive = mean_scan(NAIVE_SCENE, slot_seconds)?;
    let multi = mean_scan(MULTI_SCENE, slot_seconds)?;
    let single = mean_scan(SINGLE_SCENE, slot_seconds)?;
    let rows = vec![
        Table3Row { case: "naive", seconds: naive, bound: BASELINE_SECONDS, passed: (naive - BASELINE_SECONDS).abs() < 1e-9 },
        Table3Row { case: "multi_target", seconds: multi, bound: MULTI_TARGET_SECONDS * SLACK, passed: multi <= MULTI_TARGET_SECONDS * SLACK },
        Table3Row { case: "single_target", seconds: single, bound: SINGLE_TARGET_SECONDS * SLACK, passed: single <= SINGLE_TARGET_SECONDS * SLACK },
    ];
    Ok(Table3 { naive_slots: slots, slot_seconds, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_fits_the_baseline() {
        let (slots, s) = calibrate(10).unwrap();
        assert_eq!(slots, 44);
        assert!((s * 44.0 - BASELINE_SECONDS).abs() < 1e-12);
    }
}
