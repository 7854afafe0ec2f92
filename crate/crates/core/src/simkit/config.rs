//! Scenario files: TOML with an explicit `schema_version`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comms::{DetectConfig, IrsFrontEnd, PacketFormat, SyncConfig, DEFAULT_TX2_GAIN};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polygon};
use crate::irs::{PowerProfile, ReflectionAngle, DEFAULT_BATTERY_MWH};
use crate::locator::{ClassifyConfig, MusicGrid, Smoothing};
use crate::scheduler::RatioOrientation;
use crate::signal::ChirpConfig;

pub const SCHEMA_VERSION: u32 = 1;

fn pt(v: [f64; 2]) -> Point2 {
    Point2::new(v[0], v[1])
}

fn cfg_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub epochs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub chirp: ChirpConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub radars: Vec<RadarConfig>,
    pub irs: Option<IrsConfig>,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
    #[serde(default)]
    pub clutter: Vec<ClutterConfig>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleConfig>,
    #[serde(default)]
    pub scheduler: SchedulerConfig,
    #[serde(default)]
    pub locator: LocatorConfig,
    #[serde(default)]
    pub comms: CommsConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Per-sample SNR of a unit-gain echo at 1 m; `inf` is noiseless.
    pub snr_db: f64,
    /// SNR of the IRS envelope trace for radar-to-IRS packets; `inf` is
    /// noiseless.
    pub envelope_snr_db: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self { snr_db: 30.0, envelope_snr_db: 30.0 }
    }
}

impl ChannelConfig {
    /// Receiver noise power per complex sample.
    pub fn noise_power(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    pub id: u8,
    pub position: [f64; 2],
    #[serde(default)]
    pub boresight_deg: f64,
    /// Antenna switching frequency F, Hz.
    pub switching_hz: f64,
    #[serde(default = "one")]
    pub n_r: u32,
    #[serde(default = "one_f")]
    pub a1: f64,
    #[serde(default = "a0_default")]
    pub a0: f64,
    #[serde(default = "tx_gain_default")]
    pub tx_gain: [f64; 2],
}

fn one() -> u32 {
    1
}
fn one_f() -> f64 {
    1.0
}
fn a0_default() -> f64 {
    0.3
}
fn tx_gain_default() -> [f64; 2] {
    [1.0, DEFAULT_TX2_GAIN]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrsConfig {
    pub id: u8,
    pub position: [f64; 2],
    /// World bearing of the board normal.
    pub normal_deg: f64,
    #[serde(default = "all_angles")]
    pub angles_deg: Vec<f64>,
    /// Amplitude of the retro echo at 1 m.
    #[serde(default = "one_f")]
    pub gain: f64,
    #[serde(default)]
    pub front_end: IrsFrontEnd,
    #[serde(default)]
    pub power: PowerProfile,
    #[serde(default = "battery_default")]
    pub battery_mwh: f64,
}

fn all_angles() -> Vec<f64> {
    ReflectionAngle::ALL.iter().map(|a| a.degrees()).collect()
}
fn battery_default() -> f64 {
    DEFAULT_BATTERY_MWH
}

impl IrsConfig {
    pub fn angles(&self) -> Result<Vec<ReflectionAngle>> {
        let mut v: Vec<ReflectionAngle> =
            self.angles_deg.iter().map(|&d| ReflectionAngle::from_degrees(d)).collect::<Result<_>>()?;
        v.sort();
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub id: u8,
    #[serde(default = "one_f")]
    pub reflectivity: f64,
    pub motion: MotionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionConfig {
    Static {
        position: [f64; 2],
    },
    /// Fixed distance from the IRS; the world bearing is redrawn every epoch
    /// uniformly within `+-jitter_deg` of `bearing_deg`.
    Polar {
        bearing_deg: f64,
        distance: f64,
        #[serde(default)]
        jitter_deg: f64,
    },
    /// Back and forth along the waypoints; each leg's speed is drawn once,
    /// uniformly in `[speed_min, speed_max]`.
    Waypoints {
        points: Vec<[f64; 2]>,
        speed_min: f64,
        speed_max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutterConfig {
    pub position: [f64; 2],
    pub reflectivity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl ObstacleConfig {
    pub fn polygon(&self) -> Polygon {
        Polygon::rect(pt(self.min), pt(self.max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Naive,
    #[default]
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub mode: ScheduleMode,
    pub slot_seconds: f64,
    pub naive_slots: u32,
    pub delta_alpha_deg: f64,
    pub max_energy_slots: u32,
    /// `reference_over_range` flips the range ratio to `(r_ref / r_i)^4`.
    pub orientation: RatioOrientation,
    /// Comm slots without an IRS announcement before the radar gives up.
    pub lost_after: u32,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            mode: ScheduleMode::Adaptive,
            slot_seconds: 0.1625,
            naive_slots: 10,
            delta_alpha_deg: 15.0,
            max_energy_slots: 9,
            orientation: RatioOrientation::SnrCompensating,
            lost_after: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocatorConfig {
    pub grid: MusicGrid,
    pub smoothing: Smoothing,
    pub n_sources: usize,
    pub classify: ClassifyConfig,
    /// Echo power over the noise floor needed to report a detection, dB.
    pub min_snr_db: f64,
    /// Relay peaks must arrive within this angle of the IRS bearing, deg.
    pub irs_gate_deg: f64,
    /// Shortest IRS-target leg that is reported, m.
    pub min_leg: f64,
}

impl Default for LocatorConfig {
    fn default() -> Self {
        Self {
            grid: MusicGrid::default(),
            smoothing: Smoothing::default(),
            n_sources: 3,
            classify: ClassifyConfig::default(),
            min_snr_db: 3.0,
            irs_gate_deg: 5.0,
            min_leg: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommsConfig {
    pub packet: PacketFormat,
    pub sync: SyncConfig,
    pub detect: DetectConfig,
    /// Silence before each radar packet on the IRS trace, s.
    pub lead_seconds: f64,
}

impl Default for CommsConfig {
    fn default() -> Self {
        Self {
            packet: PacketFormat::default(),
            sync: SyncConfig::default(),
            detect: DetectConfig::default(),
            lead_seconds: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Width of the radar-target distance cells, m.
    pub distance_bin: f64,
    /// Epochs dropped from scanning-time statistics (discovery scan).
    pub warmup_epochs: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { distance_bin: 0.5, warmup_epochs: 1 }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let span = e.span().map(|s| format!(" at bytes {}..{}", s.start, s.end)).unwrap_or_default();
            cfg_err("", format!("{}{span}", e.message()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config { path: p, message } => Error::Config { path: p, message: format!("{}: {message}", path.display()) },
            other => other,
        })
    }

    /// Full config with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(cfg_err("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version)));
        }
        if self.epochs == 0 {
            return Err(cfg_err("epochs", "must be >= 1"));
        }
        self.chirp.validate().map_err(|e| cfg_err("chirp", e.to_string()))?;
        for (k, v) in [("channel.snr_db", self.channel.snr_db), ("channel.envelope_snr_db", self.channel.envelope_snr_db)] {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(cfg_err(k, "must be a number or inf"));
            }
        }
        if self.radars.is_empty() {
            return Err(cfg_err("radars", "need at least one radar"));
        }
        let mut ids = BTreeSet::new();
        let mut freqs: Vec<f64> = Vec::new();
        for (i, r) in self.radars.iter().enumerate() {
            let p = format!("radars[{i}]");
            if !ids.insert(r.id) {
                return Err(cfg_err(format!("{p}.id"), format!("duplicate radar id {}", r.id)));
            }
            if !r.position.iter().all(|v| v.is_finite()) {
                return Err(cfg_err(format!("{p}.position"), "must be finite"));
            }
            if !(r.switching_hz > 0.0) || !r.switching_hz.is_finite() {
                return Err(cfg_err(format!("{p}.switching_hz"), "must be > 0"));
            }
            if freqs.iter().any(|&f| (f - r.switching_hz).abs() < 1e-9) {
                return Err(cfg_err(format!("{p}.switching_hz"), format!("{} Hz already used by another radar", r.switching_hz)));
            }
            freqs.push(r.switching_hz);
            if r.n_r == 0 {
                return Err(cfg_err(format!("{p}.n_r"), "must be >= 1"));
            }
            if !(r.a1 > r.a0 && r.a0 >= 0.0) {
                return Err(cfg_err(format!("{p}.a0"), "need 0 <= a0 < a1"));
            }
            if !r.tx_gain.iter().all(|g| g.is_finite() && *g > 0.0) {
                return Err(cfg_err(format!("{p}.tx_gain"), "gains must be > 0"));
            }
        }
        if let Some(irs) = &self.irs {
            if irs.id > 0x0f {
                return Err(cfg_err("irs.id", "must fit the 4-bit id field (0..=15)"));
            }
            if let Err(e) = irs.angles() {
                return Err(cfg_err("irs.angles_deg", e.to_string()));
            }
            if irs.angles_deg.is_empty() {
                return Err(cfg_err("irs.angles_deg", "need at least one angle"));
            }
            if !irs.position.iter().all(|v| v.is_finite()) || !irs.normal_deg.is_finite() {
                return Err(cfg_err("irs.position", "must be finite"));
            }
            if !(irs.gain > 0.0) {
                return Err(cfg_err("irs.gain", "must be > 0"));
            }
            if !(irs.front_end.mcu_rate > 0.0) || irs.front_end.oversample == 0 {
                return Err(cfg_err("irs.front_end", "mcu_rate > 0 and oversample >= 1 required"));
            }
            irs.power.validate().map_err(|e| cfg_err("irs.power", e.to_string()))?;
            for (i, r) in self.radars.iter().enumerate() {
                if r.switching_hz >= irs.front_end.mcu_rate / 2.0 {
                    return Err(cfg_err(
                        format!("radars[{i}].switching_hz"),
                        format!("must be below the IRS Nyquist rate {}", irs.front_end.mcu_rate / 2.0),
                    ));
                }
            }
        }
        let mut tids = BTreeSet::new();
        for (i, t) in self.targets.iter().enumerate() {
            let p = format!("targets[{i}]");
            if !tids.insert(t.id) {
                return Err(cfg_err(format!("{p}.id"), format!("duplicate target id {}", t.id)));
            }
            if !(t.reflectivity >= 0.0) {
                return Err(cfg_err(format!("{p}.reflectivity"), "must be >= 0"));
            }
            match &t.motion {
                MotionConfig::Static { position } if !position.iter().all(|v| v.is_finite()) => {
                    return Err(cfg_err(format!("{p}.motion.position"), "must be finite"));
                }
                MotionConfig::Polar { distance, jitter_deg, .. } => {
                    if !(*distance > 0.0) {
                        return Err(cfg_err(format!("{p}.motion.distance"), "must be > 0"));
                    }
                    if !(*jitter_deg >= 0.0) {
                        return Err(cfg_err(format!("{p}.motion.jitter_deg"), "must be >= 0"));
                    }
                    if self.irs.is_none() {
                        return Err(cfg_err(format!("{p}.motion"), "polar motion is relative to the IRS, which is absent"));
                    }
                }
                MotionConfig::Waypoints { points, speed_min, speed_max } => {
                    if points.len() < 2 {
                        return Err(cfg_err(format!("{p}.motion.points"), "need at least two waypoints"));
                    }
                    if !(*speed_min > 0.0 && speed_max >= speed_min) {
                        return Err(cfg_err(format!("{p}.motion.speed_min"), "need 0 < speed_min <= speed_max"));
                    }
                }
                MotionConfig::Static { .. } => {}
            }
        }
        for (i, c) in self.clutter.iter().enumerate() {
            if !(c.reflectivity >= 0.0) || !c.position.iter().all(|v| v.is_finite()) {
                return Err(cfg_err(format!("clutter[{i}]"), "finite position and reflectivity >= 0 required"));
            }
        }
        let s = &self.scheduler;
        if !(s.slot_seconds > 0.0) {
            return Err(cfg_err("scheduler.slot_seconds", "must be > 0"));
        }
        if s.naive_slots == 0 {
            return Err(cfg_err("scheduler.naive_slots", "must be >= 1"));
        }
        if s.max_energy_slots == 0 {
            return Err(cfg_err("scheduler.max_energy_slots", "must be >= 1"));
        }
        if !(s.delta_alpha_deg > 0.0) {
            return Err(cfg_err("scheduler.delta_alpha_deg", "must be > 0"));
        }
        if s.lost_after == 0 {
            return Err(cfg_err("scheduler.lost_after", "must be >= 1"));
        }
        let l = &self.locator;
        if l.n_sources == 0 || l.n_sources >= l.smoothing.rx * l.smoothing.samples {
            return Err(cfg_err("locator.n_sources", "must be in 1..subarray size"));
        }
        if l.smoothing.rx > 4 || l.smoothing.samples > self.chirp.samples_per_chirp() || l.smoothing.rx == 0 || l.smoothing.samples == 0 {
            return Err(cfg_err("locator.smoothing", "subarray exceeds the 4 x N receive cube"));
        }
        if !(l.grid.range_step > 0.0 && l.grid.angle_step_deg > 0.0 && l.grid.range_max > l.grid.range_min) {
            return Err(cfg_err("locator.grid", "steps must be > 0 and range_max > range_min"));
        }
        self.comms.packet.validate().map_err(|e| cfg_err("comms.packet", e.to_string()))?;
        if !(self.comms.lead_seconds >= 0.0) {
            return Err(cfg_err("comms.lead_seconds", "must be >= 0"));
        }
        if !(self.metrics.distance_bin > 0.0) {
            return Err(cfg_err("metrics.distance_bin", "must be > 0"));
        }
        Ok(())
    }

    pub fn obstacles(&self) -> Vec<Polygon> {
        self.obstacles.iter().map(ObstacleConfig::polygon).collect()
    }
}

pub(crate) fn point(v: [f64; 2]) -> Point2 {
    pt(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const MINIMAL: &str = r#"
schema_version = 1
name = "minimal"
epochs = 2

[[radars]]
id = 0
position = [0.0, 0.0]
switching_hz = 10.0

[irs]
id = 3
position = [1.0, 0.0]
normal_deg = 180.0

[[targets]]
id = 1
motion = { kind = "static", position = [-0.4, 1.4] }
"#;

    #[test]
    fn minimal_parses_with_defaults() {
        let c = ScenarioConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.scheduler.mode, ScheduleMode::Adaptive);
        assert_eq!(c.irs.as_ref().unwrap().angles().unwrap(), ReflectionAngle::ALL);
        assert_eq!(c.radars[0].n_r, 1);
        let again = ScenarioConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    fn err_path(text: &str) -> String {
        match ScenarioConfig::from_toml(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(err_path(&MINIMAL.replace("schema_version = 1", "schema_version = 2")), "schema_version");
        let two = MINIMAL.replace(
            "[irs]",
            "[[radars]]\nid = 1\nposition = [0.0, 1.0]\nswitching_hz = 10.0\n\n[irs]",
        );
        assert_eq!(err_path(&two), "radars[1].switching_hz");
        let dup = two.replace("id = 1\nposition = [0.0, 1.0]\nswitching_hz = 10.0", "id = 0\nposition = [0.0, 1.0]\nswitching_hz = 5.0");
        assert_eq!(err_path(&dup), "radars[1].id");
        assert_eq!(err_path(&MINIMAL.replace("normal_deg = 180.0", "normal_deg = 180.0\nangles_deg = [30.0, 50.0]")), "irs.angles_deg");
        assert_eq!(err_path(&MINIMAL.replace("switching_hz = 10.0", "switching_hz = 40.0")), "radars[0].switching_hz");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ScenarioConfig::from_toml(&MINIMAL.replace("epochs = 2", "epochs = 2\nbogus = 1")).is_err());
    }
}
