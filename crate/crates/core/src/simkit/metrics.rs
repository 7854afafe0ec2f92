//! Run records, aggregated metrics and report files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irs::{PowerBudget, ReflectionAngle};
use crate::scheduler::TargetDetection;

use super::codebook::Message;
use super::config::ScheduleMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotKind {
    RadarToIrs,
    Comm,
    Sensing,
}

impl SlotKind {
    pub fn code(self) -> char {
        match self {
            SlotKind::RadarToIrs => 'R',
            SlotKind::Comm => 'C',
            SlotKind::Sensing => 'S',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    IdBroadcast { radar: u8, decoded: Option<Message> },
    AoiPacket { radar: u8, sent: String, received: Option<String>, message: Option<Message> },
    Announce { radar: u8, angle: ReflectionAngle, decoded: Option<Message> },
    Sense { radar: u8, angle: ReflectionAngle, slots: u32 },
    Wait { radar: u8, angle: ReflectionAngle },
    NewAoi { radar: u8, entries: Vec<(ReflectionAngle, u32)> },
    FallBackToNaive { radar: u8, max_feasible_d_scan: u32 },
    IrsLost { radar: u8 },
    IrsWarning { message: String },
    RadarWarning { radar: u8, message: String },
}

impl EventKind {
    /// Slot type the event must fall in.
    pub fn required_slot(&self) -> Option<SlotKind> {
        match self {
            EventKind::AoiPacket { .. } => Some(SlotKind::RadarToIrs),
            EventKind::IdBroadcast { .. } | EventKind::Announce { .. } => Some(SlotKind::Comm),
            EventKind::Sense { .. } => Some(SlotKind::Sensing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Slot index within the epoch's slot string; `None` between slots.
    pub slot: Option<usize>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub radar: u8,
    pub angle: ReflectionAngle,
    pub t: f64,
    pub detection: TargetDetection,
    pub estimate: [f64; 2],
    pub target: Option<u8>,
    pub truth: Option<[f64; 2]>,
    /// True radar-IRS-target path length, m.
    pub true_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub scenario: String,
    pub epoch: usize,
    pub t_start: f64,
    pub mode: ScheduleMode,
    /// One character per slot: `R` radar-to-IRS, `C` comm, `S` sensing.
    pub slots: String,
    pub scan_seconds: f64,
    pub events: Vec<EventRecord>,
    pub estimates: Vec<EstimateRecord>,
    /// Targets inside a sensed beam that produced no estimate.
    pub missed: Vec<(u8, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDirection {
    RadarToIrs,
    IrsToRadar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkKey {
    pub direction: LinkDirection,
    pub radar: u8,
    pub distance_mm: i64,
    pub angle: Option<ReflectionAngle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinkStats {
    pub packets: u64,
    pub failed: u64,
    pub bits: u64,
    pub bit_errors: u64,
}

impl LinkStats {
    pub fn add(&mut self, o: &LinkStats) {
        self.packets += o.packets;
        self.failed += o.failed;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub dx: f64,
    pub dy: f64,
    pub error: f64,
}

/// Raw samples behind every reported metric. Merging concatenates, so it is
/// associative and the order is fixed by the caller.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenarios: Vec<String>,
    /// Resolved scenario configs, defaults included.
    pub configs: Vec<String>,
    /// Localization errors keyed by distance cell (mm).
    pub errors: BTreeMap<i64, Vec<ErrorSample>>,
    pub misses: BTreeMap<i64, u64>,
    pub links: BTreeMap<LinkKey, LinkStats>,
    pub scan_times: Vec<f64>,
    pub power: Option<PowerBudget>,
    pub epochs: Vec<EpochRecord>,
}

pub fn median(v: &[f64]) -> f64 {
    percentile(v, 50.0)
}

/// Linear-interpolated percentile; NaN for an empty slice.
pub fn percentile(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = (p / 100.0).clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

impl MetricsReport {
    pub fn merge(mut self, other: MetricsReport) -> MetricsReport {
        self.scenarios.extend(other.scenarios);
        self.configs.extend(other.configs);
        for (k, v) in other.errors {
            self.errors.entry(k).or_default().extend(v);
        }
        for (k, v) in other.misses {
            *self.misses.entry(k).or_default() += v;
        }
        for (k, v) in other.links {
            self.links.entry(k).or_default().add(&v);
        }
        self.scan_times.extend(other.scan_times);
        self.power = self.power.or(other.power);
        self.epochs.extend(other.epochs);
        self
    }

    /// Median Euclidean localization error per distance cell, m.
    pub fn median_errors(&self) -> BTreeMap<i64, f64> {
        self.errors
            .iter()
            .map(|(&k, v)| (k, median(&v.iter().map(|s| s.error).collect::<Vec<_>>())))
            .collect()
    }

    pub fn all_errors(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.errors.values().flatten().map(|s| s.error).collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn mean_scan_time(&self) -> Option<f64> {
        (!self.scan_times.is_empty()).then(|| self.scan_times.iter().sum::<f64>() / self.scan_times.len() as f64)
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("metric,distance_m,angle_deg,radar,n,value\n");
        let mut row = |metric: &str, dist: Option<i64>, angle: Option<ReflectionAngle>, radar: Option<u8>, n: usize, value: f64| {
            let d = dist.map(|mm| format!("{:.3}", mm as f64 / 1000.0)).unwrap_or_default();
            let a = angle.map(|a| format!("{}", a.degrees())).unwrap_or_default();
            let r = radar.map(|r| r.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{metric},{d},{a},{r},{n},{value:.6}");
        };
        for (&cell, samples) in &self.errors {
            let n = samples.len();
            let col = |f: fn(&ErrorSample) -> f64| median(&samples.iter().map(f).collect::<Vec<_>>()) * 100.0;
            row("median_abs_dx_cm", Some(cell), None, None, n, col(|s| s.dx.abs()));
            row("median_abs_dy_cm", Some(cell), None, None, n, col(|s| s.dy.abs()));
            row("median_error_cm", Some(cell), None, None, n, col(|s| s.error));
        }
        for (&cell, &m) in &self.misses {
            let hits = self.errors.get(&cell).map_or(0, Vec::len);
            row("miss_rate", Some(cell), None, None, hits + m as usize, m as f64 / (hits as f64 + m as f64));
        }
        for (k, s) in &self.links {
            let name = match k.direction {
                LinkDirection::RadarToIrs => "ber_radar_to_irs",
                LinkDirection::IrsToRadar => "ber_irs_to_radar",
            };
            row(name, Some(k.distance_mm), k.angle, Some(k.radar), s.bits as usize, s.ber());
            let fail = if s.packets == 0 { 0.0 } else { s.failed as f64 / s.packets as f64 };
            row(&format!("{name}_packet_failure"), Some(k.distance_mm), k.angle, Some(k.radar), s.packets as usize, fail);
        }
        if let Some(avg) = self.mean_scan_time() {
            row("scan_time_avg_s", None, None, None, self.scan_times.len(), avg);
            row("scan_time_p95_s", None, None, None, self.scan_times.len(), percentile(&self.scan_times, 95.0));
        }
        if let Some(p) = self.power {
            row("irs_power_uw", None, None, None, 1, p.average_uw);
            row("irs_battery_days", None, None, None, 1, p.lifetime_days);
        }
        out
    }

    pub fn cdf_csv(&self) -> String {
        let e = self.all_errors();
        let mut out = String::from("error_cm,cdf\n");
        for (i, v) in e.iter().enumerate() {
            let _ = writeln!(out, "{:.6},{:.6}", v * 100.0, (i + 1) as f64 / e.len() as f64);
        }
        out
    }

    pub fn epochs_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.epochs {
            out.push_str(&serde_json::to_string(e).expect("records serialise"));
            out.push('\n');
        }
        out
    }

    /// Human-readable statistics, without the config dump.
    pub fn stats(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenarios: {}", self.scenarios.join(", "));
        let _ = writeln!(s, "epochs: {}", self.epochs.len());
        for (cell, m) in self.median_errors() {
            let n = self.errors[&cell].len();
            let _ = writeln!(s, "distance {:.2} m: median error {:.2} cm over {n} estimates", cell as f64 / 1000.0, m * 100.0);
        }
        if let Some(avg) = self.mean_scan_time() {
            let _ = writeln!(s, "scanning time: mean {avg:.4} s, p95 {:.4} s", percentile(&self.scan_times, 95.0));
        }
        for (k, v) in &self.links {
            let _ = writeln!(
                s,
                "link {:?} radar {} at {:.2} m{}: {} packets, {} failed, BER {:.4}",
                k.direction,
                k.radar,
                k.distance_mm as f64 / 1000.0,
                k.angle.map(|a| format!(" angle {a}")).unwrap_or_default(),
                v.packets,
                v.failed,
                v.ber()
            );
        }
        if let Some(p) = self.power {
            let _ = writeln!(s, "IRS power: {:.1} uW, {:.0} days", p.average_uw, p.lifetime_days);
        }
        s
    }

    /// [`Self::stats`] followed by every resolved config.
    pub fn summary(&self) -> String {
        let mut s = self.stats();
        for c in &self.configs {
            let _ = writeln!(s, "\n# resolved config\n{c}");
        }
        s
    }
}

/// Writes `metrics.csv`, `cdf.csv`, `epochs.jsonl` and `summary.txt`.
pub fn emit_reports(report: &MetricsReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    for (name, body) in [
        ("metrics.csv", report.metrics_csv()),
        ("cdf.csv", report.cdf_csv()),
        ("epochs.jsonl", report.epochs_jsonl()),
        ("summary.txt", report.summary()),
    ] {
        let p = out_dir.join(name);
        fs::write(&p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}
