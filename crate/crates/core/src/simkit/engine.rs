//! Slot-level scenario engine.
//!
//! One epoch is one super-frame. The IRS state machine drives the slot
//! sequence; every radar sees the same slots and runs its own state machine
//! on what it received. Randomness comes from three independent streams
//! (target motion, radar receiver noise, IRS envelope noise) so changing one
//! part of a scenario does not reshuffle the others.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::comms::{
    bits_to_string, decode_bits, detect_radars, ook_demodulate, chirp_magnitudes_at_range, noise_sigma_for_snr,
    ook_modulate, separate_radar, slot_levels, sync_candidates, BitTiming, EnvelopeTrace, OokLevels, RadarLink, RadarTxPlan,
    Transmission,
};
use crate::error::{Error, Result};
use crate::geometry::{path_between, wrap_angle, IrsSite, Point2, Polygon, RadarSite, TargetState};
use crate::irs::{power_budget, reflect_gain, IrsMode, IrsState, ReflectionAngle};
use crate::locator::{classify_nlos, localize_irs, localize_target, music_scan, MusicGrid, MusicPeak, PeakLabel, RxCube};
use crate::scheduler::{AngleDurationSet, AoiParams, TargetDetection};
use crate::signal::{range_doppler, synthesize_array_frames, IqFrame, PathEcho};

use super::codebook::Message;
use super::config::{point, RadarConfig, ScenarioConfig};
use super::fsm::{
    irs_fsm_step, radar_fsm_step, AdcOutcome, IrsAction, IrsEvent, IrsFsm, RadarAction, RadarEvent, RadarFsm,
    RadarObservation, RadarPhase,
};
use super::metrics::{
    EpochRecord, ErrorSample, EstimateRecord, EventKind, EventRecord, LinkDirection, LinkKey, LinkStats,
    MetricsReport, SlotKind,
};
use super::motion::{closing_speed, Motion};

/// Receive elements of the radar.
pub const RX_COUNT: usize = 4;

/// An estimate within this distance of a target counts as detecting it, m.
const MATCH_RADIUS: f64 = 0.5;

const MOTION_STREAM: u64 = 0;
const RADAR_STREAM: u64 = 1;
const COMM_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

/// Distance cell key in millimetres.
pub fn cell_mm(d: f64, bin: f64) -> i64 {
    ((d / bin).round() * bin * 1000.0).round() as i64
}

/// Static part of the scene plus target trajectories.
struct World {
    irs: Option<IrsSite>,
    irs_gain: f64,
    clutter: Vec<(Point2, f64)>,
    obstacles: Vec<Polygon>,
    targets: Vec<(u8, f64, Motion)>,
    noise_power: f64,
}

impl World {
    fn blocked(&self, a: Point2, b: Point2) -> bool {
        self.obstacles.iter().any(|o| o.intersects_segment(a, b))
    }

    fn targets_at(&self, epoch: usize, t: f64) -> Vec<TargetState> {
        self.targets
            .iter()
            .map(|(id, refl, m)| {
                let (position, velocity) = m.state(epoch, t);
                TargetState { id: *id, position, velocity, reflectivity: *refl }
            })
            .collect()
    }

    /// Every path the radar receives with the IRS in `state`. Amplitudes are
    /// radar-equation scaled: `sigma / d^2` for a direct echo and
    /// `gain * sigma * g^2 / (d_rs^2 d_st^2)` through the IRS, `g` applied
    /// once per pass.
    fn echoes(&self, site: &RadarSite, state: Option<IrsState>, targets: &[TargetState]) -> Vec<PathEcho> {
        let p = site.position;
        let mut out = Vec::new();
        let direct = |q: Point2, sigma: f64, v: f64, out: &mut Vec<PathEcho>| {
            let d = p.distance(&q);
            let aoa = wrap_angle(p.bearing_to(&q) - site.boresight);
            if d > 0.0 && sigma > 0.0 && aoa.abs() < FRAC_PI_2 && !self.blocked(p, q) {
                out.push(PathEcho::at_range(d, sigma / (d * d)).with_velocity(v).with_aoa(aoa));
            }
        };
        for &(q, sigma) in &self.clutter {
            direct(q, sigma, 0.0, &mut out);
        }
        for t in targets {
            direct(t.position, t.reflectivity, closing_speed(p, t.position, t.velocity), &mut out);
        }
        let (Some(irs), Some(state)) = (self.irs, state) else {
            return out;
        };
        let s = irs.position;
        let d_rs = p.distance(&s);
        let aoa = wrap_angle(p.bearing_to(&s) - site.boresight);
        let theta_in = wrap_angle(s.bearing_to(&p) - irs.normal);
        if !(d_rs > 0.0) || aoa.abs() >= FRAC_PI_2 || theta_in.abs() >= FRAC_PI_2 || self.blocked(p, s) {
            return out;
        }
        let g_self = reflect_gain(&state, theta_in, theta_in);
        if g_self > 0.0 {
            out.push(PathEcho::at_range(d_rs, self.irs_gain * g_self / (d_rs * d_rs)).with_aoa(aoa));
        }
        for t in targets {
            let d_st = s.distance(&t.position);
            let theta_out = wrap_angle(s.bearing_to(&t.position) - irs.normal);
            if !(d_st > 0.0) || theta_out.abs() >= FRAC_PI_2 || self.blocked(s, t.position) {
                continue;
            }
            let g = reflect_gain(&state, theta_in, theta_out);
            let amp = self.irs_gain * t.reflectivity * g * g / (d_rs * d_rs * d_st * d_st);
            if amp > 0.0 {
                out.push(
                    PathEcho::new(2.0 * (d_rs + d_st), amp)
                        .with_velocity(closing_speed(s, t.position, t.velocity))
                        .with_aoa(aoa),
                );
            }
        }
        out
    }
}

/// What a radar learnt about the IRS when it decoded its ID.
#[derive(Debug, Clone)]
struct IrsFix {
    position: Point2,
    /// Measured radar-IRS distance, m.
    range: f64,
    /// Arrival angle relative to boresight, rad.
    aoa: f64,
    /// World bearing of the IRS, rad.
    phi: f64,
    /// Peaks with the IRS absorbing: the line-of-sight baseline.
    baseline: Vec<MusicPeak>,
}

#[derive(Debug, Clone)]
struct Sensed {
    angle: ReflectionAngle,
    t: f64,
    power: f64,
    detection: TargetDetection,
    estimate: Point2,
    truths: Vec<(u8, Point2, f64)>,
}

struct RadarRt {
    cfg: RadarConfig,
    site: RadarSite,
    fsm: RadarFsm,
    fix: Option<IrsFix>,
    outbox: Option<AngleDurationSet>,
    sensed: Vec<Sensed>,
    /// Targets lit by a sensed beam: (id, true path length).
    expected: Vec<(u8, f64)>,
}

struct Clock {
    t_start: f64,
    slot_seconds: f64,
    slots: String,
}

impl Clock {
    fn push(&mut self, k: SlotKind) -> usize {
        self.slots.push(k.code());
        self.slots.len() - 1
    }

    fn time(&self, slot: usize) -> f64 {
        self.t_start + slot as f64 * self.slot_seconds
    }
}

struct Engine<'a> {
    cfg: &'a ScenarioConfig,
    world: World,
    radars: Vec<RadarRt>,
    irs: Option<IrsFsm>,
    radar_rng: ChaCha8Rng,
    comm_rng: ChaCha8Rng,
    report: MetricsReport,
    t: f64,
}

/// Runs every epoch of a scenario. Deterministic in `cfg` (seed included).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport> {
    cfg.validate()?;
    Engine::new(cfg)?.run()
}

/// Half the bits of a packet that never decoded are counted as errors, the
/// expectation of guessing.
fn bit_stats(sent: &[bool], got: Option<&[bool]>) -> LinkStats {
    let n = sent.len() as u64;
    match got {
        Some(g) => {
            let errors = sent.iter().enumerate().filter(|&(i, b)| g.get(i) != Some(b)).count() as u64;
            LinkStats { packets: 1, failed: u64::from(errors > 0), bits: n, bit_errors: errors }
        }
        None => LinkStats { packets: 1, failed: 1, bits: n, bit_errors: n / 2 },
    }
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let mut motion_rng = stream(cfg.seed, MOTION_STREAM);
        let irs = cfg.irs.as_ref().map(|i| IrsSite { position: point(i.position), normal: i.normal_deg.to_radians() });
        let targets = cfg
            .targets
            .iter()
            .map(|t| Ok((t.id, t.reflectivity, Motion::new(&t.motion, irs.map(|s| s.position), cfg.epochs, &mut motion_rng)?)))
            .collect::<Result<Vec<_>>>()?;
        let noise_power = if cfg.channel.snr_db.is_finite() { cfg.channel.noise_power() } else { 0.0 };
        let world = World {
            irs,
            irs_gain: cfg.irs.as_ref().map_or(0.0, |i| i.gain),
            clutter: cfg.clutter.iter().map(|c| (point(c.position), c.reflectivity)).collect(),
            obstacles: cfg.obstacles(),
            targets,
            noise_power,
        };
        let angles = match &cfg.irs {
            Some(i) => i.angles()?,
            None => ReflectionAngle::ALL.to_vec(),
        };
        let s = &cfg.scheduler;
        let params = AoiParams {
            delta_alpha_deg: s.delta_alpha_deg,
            max_energy_slots: s.max_energy_slots,
            slot_seconds: s.slot_seconds,
            orientation: s.orientation,
        };
        let wavelength = cfg.chirp.wavelength();
        let radars = cfg
            .radars
            .iter()
            .map(|r| {
                Ok(RadarRt {
                    cfg: r.clone(),
                    site: RadarSite::new(r.id, point(r.position), r.boresight_deg.to_radians(), wavelength),
                    fsm: RadarFsm::new(s.mode, &angles, s.naive_slots, params, s.lost_after)?,
                    fix: None,
                    outbox: None,
                    sensed: Vec::new(),
                    expected: Vec::new(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let power = match &cfg.irs {
            Some(i) => Some(power_budget(&i.power, i.battery_mwh)?),
            None => None,
        };
        Ok(Self {
            cfg,
            world,
            radars,
            irs: cfg.irs.as_ref().map(|i| IrsFsm::new(i.id, angles.clone())),
            radar_rng: stream(cfg.seed, RADAR_STREAM),
            comm_rng: stream(cfg.seed, COMM_STREAM),
            report: MetricsReport {
                scenarios: vec![cfg.name.clone()],
                configs: vec![cfg.to_toml()],
                power,
                ..Default::default()
            },
            t: 0.0,
        })
    }

    fn run(mut self) -> Result<MetricsReport> {
        for epoch in 0..self.cfg.epochs {
            let rec = self.run_epoch(epoch)?;
            if epoch >= self.cfg.metrics.warmup_epochs && rec.scan_seconds > 0.0 {
                self.report.scan_times.push(rec.scan_seconds);
            }
            self.report.epochs.push(rec);
        }
        Ok(self.report)
    }

    fn cps(&self) -> usize {
        self.cfg.chirp.chirps_per_slot
    }

    fn link(&mut self, direction: LinkDirection, radar: u8, angle: Option<ReflectionAngle>, stats: LinkStats) {
        let irs = self.world.irs.expect("links need an IRS").position;
        let d = self.radars.iter().find(|r| r.cfg.id == radar).expect("known radar").site.position.distance(&irs);
        let key = LinkKey { direction, radar, distance_mm: cell_mm(d, self.cfg.metrics.distance_bin), angle };
        self.report.links.entry(key).or_default().add(&stats);
    }

    /// One chirp burst per IRS state, `per_state` chirps each, chirps[c][rx].
    fn capture(&mut self, i: usize, states: &[Option<IrsState>], per_state: usize, targets: &[TargetState]) -> Result<Vec<Vec<IqFrame>>> {
        let mut out = Vec::with_capacity(states.len() * per_state);
        for st in states {
            let echoes = self.world.echoes(&self.radars[i].site, *st, targets);
            for _ in 0..per_state {
                let k = out.len();
                out.push(synthesize_array_frames(&self.cfg.chirp, &echoes, self.world.noise_power, k, RX_COUNT, &mut self.radar_rng)?);
            }
        }
        Ok(out)
    }

    /// OOK symbols read at `range`, levels trained on the known prefix.
    fn read_ook(&self, chirps: &[Vec<IqFrame>], range: f64) -> Result<Vec<bool>> {
        let rx0: Vec<IqFrame> = chirps.iter().map(|c| c[0].clone()).collect();
        let mags = chirp_magnitudes_at_range(&rx0, &self.cfg.chirp, range)?;
        let levels = slot_levels(&mags, self.cps())?;
        let prefix = self.cfg.comms.packet.prefix();
        let n = prefix.len().min(levels.len());
        let trained = OokLevels::train(&levels[..n], &prefix[..n])?;
        ook_demodulate(&mags, self.cps(), Some(&trained))
    }

    fn message_of(&self, bits: &[bool]) -> Result<Message> {
        Message::decode(&self.cfg.comms.packet.deframe(bits)?)
    }

    fn scan(&self, chirps: &[Vec<IqFrame>], grid: &MusicGrid) -> Result<crate::locator::MusicScan> {
        let l = &self.cfg.locator;
        music_scan(&RxCube::from_chirps(chirps)?, &self.cfg.chirp, grid, l.n_sources, l.smoothing)
    }

    /// Finds the IRS in an ID broadcast: peaks that vanish when the IRS
    /// absorbs are tried strongest first until one carries a valid ID packet.
    fn boot(&self, chirps: &[Vec<IqFrame>]) -> (Option<IrsFix>, Option<Vec<bool>>, Option<Message>) {
        let prefix = self.cfg.comms.packet.prefix();
        let cps = self.cps();
        let pick = |want: bool| -> Vec<Vec<IqFrame>> {
            prefix
                .iter()
                .enumerate()
                .filter(|&(_, &b)| b == want)
                .flat_map(|(k, _)| chirps[k * cps..(k + 1) * cps].iter().cloned())
                .collect()
        };
        let grid = self.cfg.locator.grid;
        let (Ok(on), Ok(off)) = (self.scan(&pick(true), &grid), self.scan(&pick(false), &grid)) else {
            return (None, None, None);
        };
        let mut cands: Vec<MusicPeak> = classify_nlos(&on.peaks, &off.peaks, &self.cfg.locator.classify)
            .into_iter()
            .filter(|(p, l)| *l == PeakLabel::NlosViaIrs && on.snr_db(p) >= self.cfg.locator.min_snr_db)
            .map(|(p, _)| p)
            .collect();
        cands.sort_by(|a, b| b.power.total_cmp(&a.power));
        let mut first_bits = None;
        for p in cands {
            let Ok(bits) = self.read_ook(chirps, p.range) else { continue };
            let msg = self.message_of(&bits).ok();
            if let Some(Message::IdAnnounce { .. }) = msg {
                let fix = IrsFix { position: Point2::default(), range: p.range, aoa: p.aoa, phi: 0.0, baseline: off.peaks.clone() };
                return (Some(fix), Some(bits), msg);
            }
            first_bits.get_or_insert(bits);
        }
        (None, first_bits, None)
    }

    fn apply(&mut self, i: usize, actions: Vec<RadarAction>, slot: Option<usize>, rec: &mut EpochRecord) -> Option<(ReflectionAngle, u32)> {
        let radar = self.radars[i].cfg.id;
        let mut sense = None;
        for a in actions {
            let kind = match a {
                RadarAction::Chirp => continue,
                RadarAction::SendAoi(set) => {
                    self.radars[i].outbox = Some(set);
                    continue;
                }
                RadarAction::Sense(angle, slots) => {
                    sense = Some((angle, slots));
                    EventKind::Sense { radar, angle, slots }
                }
                RadarAction::Wait(angle) => EventKind::Wait { radar, angle },
                RadarAction::NewAoi(set) => EventKind::NewAoi { radar, entries: set.entries().to_vec() },
                RadarAction::FallBackToNaive { max_feasible_d_scan } => EventKind::FallBackToNaive { radar, max_feasible_d_scan },
                RadarAction::IrsLost => {
                    self.radars[i].fix = None;
                    EventKind::IrsLost { radar }
                }
            };
            // A sensing action belongs to the first sensing slot after the
            // announcement.
            let slot = match kind {
                EventKind::Sense { .. } => slot.map(|s| s + 1),
                _ => slot,
            };
            rec.events.push(EventRecord { slot, kind });
        }
        sense
    }

    fn step(&mut self, i: usize, ev: RadarEvent, slot: Option<usize>, rec: &mut EpochRecord) -> Option<(ReflectionAngle, u32)> {
        let (next, actions) = radar_fsm_step(&self.radars[i].fsm, &ev);
        self.radars[i].fsm = next;
        self.apply(i, actions, slot, rec)
    }

    fn broadcast_id(&mut self, irs_id: u8, clock: &Clock, slot: usize, epoch: usize, rec: &mut EpochRecord) -> Result<()> {
        let bits = self.cfg.comms.packet.frame(&Message::IdAnnounce { irs_id }.encode()?)?;
        let states: Vec<Option<IrsState>> = ook_modulate(irs_id, &bits).into_iter().map(Some).collect();
        let targets = self.world.targets_at(epoch, clock.time(slot));
        for i in 0..self.radars.len() {
            let chirps = self.capture(i, &states, self.cps(), &targets)?;
            let (fix, got, msg) = self.boot(&chirps);
            let radar = self.radars[i].cfg.id;
            self.link(LinkDirection::IrsToRadar, radar, None, bit_stats(&bits, got.as_deref()));
            let obs = match (&msg, fix) {
                (Some(Message::IdAnnounce { irs_id }), Some(mut fix)) => {
                    let site = &self.radars[i].site;
                    let peak = MusicPeak { range: fix.range, aoa: fix.aoa, power: 0.0 };
                    fix.position = localize_irs(Some(&peak), site)?;
                    fix.phi = site.boresight + fix.aoa;
                    self.radars[i].fix = Some(fix);
                    RadarObservation::IrsId(*irs_id)
                }
                _ => RadarObservation::NoOok,
            };
            rec.events.push(EventRecord { slot: Some(slot), kind: EventKind::IdBroadcast { radar, decoded: msg } });
            self.step(i, RadarEvent::RxFrame(obs), Some(slot), rec);
        }
        Ok(())
    }

    /// First packet on the trace: sync candidates are tried earliest first
    /// and the first one framing a whole packet with the right prefix wins.
    fn decode_trace(&self, trace: &EnvelopeTrace, f: f64, n_r: u32) -> Result<Vec<bool>> {
        let timing = BitTiming { f, n_r };
        let prefix = self.cfg.comms.packet.prefix();
        let n = self.cfg.comms.packet.packet_len();
        let mut last = Error::InsufficientSamples("no sync candidate".into());
        for off in sync_candidates(trace, &timing, &prefix, &self.cfg.comms.sync)? {
            match decode_bits(&trace.skip(off), &timing, &prefix) {
                Ok(bits) if bits.len() >= n && bits[..prefix.len()] == prefix[..] => return Ok(bits[..n].to_vec()),
                Ok(bits) => last = Error::InsufficientSamples(format!("{} of {n} bits after sync", bits.len())),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// The AoI packets of every sending radar on one IRS envelope trace.
    fn radar_to_irs(&mut self, senders: &[(usize, AngleDurationSet)], slot: usize, rec: &mut EpochRecord) -> Result<AdcOutcome> {
        let irs_cfg = self.cfg.irs.as_ref().expect("radar-to-IRS slot needs an IRS");
        let irs_pos = point(irs_cfg.position);
        let lead = self.cfg.comms.lead_seconds;
        let mut sent = Vec::new();
        for (_, set) in senders {
            sent.push(self.cfg.comms.packet.frame(&Message::AoiSet { angles: set.angles().collect() }.encode()?)?);
        }
        // Every radar repeats its packet for as long as the slowest one
        // needs, so all subcarriers span the whole slot.
        let packet_seconds = |r: &RadarConfig, bits: &[bool]| 2.0 * r.n_r as f64 * bits.len() as f64 / r.switching_hz;
        let slowest = senders
            .iter()
            .zip(&sent)
            .map(|((i, _), b)| packet_seconds(&self.radars[*i].cfg, b))
            .fold(0.0, f64::max);
        let mut txs = Vec::new();
        for ((i, _), bits) in senders.iter().zip(&sent) {
            let r = &self.radars[*i];
            let repeats = ((slowest / packet_seconds(&r.cfg, bits) + 1e-9).floor() as usize).max(1);
            let plan = RadarTxPlan::new(r.cfg.switching_hz, r.cfg.n_r, r.cfg.a0, r.cfg.a1, bits.repeat(repeats));
            let link = RadarLink::from_geometry(&r.site, irs_pos, r.cfg.tx_gain);
            txs.push(Transmission { plan, link, start: lead });
        }
        // Trailing guard of one bit plus the lead so a late sync still finds
        // every bit.
        let tail = txs.iter().map(|t| t.plan.duration() + t.plan.bit_seconds()).fold(0.0, f64::max);
        let mut trace = irs_cfg.front_end.receive(&txs, 2.0 * lead + tail)?;
        if self.cfg.channel.envelope_snr_db.is_finite() {
            let sigma = noise_sigma_for_snr(&trace, self.cfg.channel.envelope_snr_db);
            trace.add_noise(sigma, &mut self.comm_rng);
        }
        let decoded: Vec<Result<Vec<bool>>> = if self.cfg.radars.len() == 1 {
            let r = &self.radars[senders[0].0].cfg;
            vec![self.decode_trace(&trace, r.switching_hz, r.n_r)]
        } else {
            // The IRS listens for the known radar frequency plan and decodes
            // each line it finds at its planned frequency.
            let found = detect_radars(&trace, &self.cfg.comms.detect).unwrap_or_default();
            senders
                .iter()
                .map(|(i, _)| {
                    let r = &self.radars[*i].cfg;
                    let f = r.switching_hz;
                    if found.iter().any(|&g| (g - f).abs() <= 0.25 * f) {
                        separate_radar(&trace, f).and_then(|s| self.decode_trace(&s, f, r.n_r))
                    } else {
                        Err(Error::FrequencyOutOfBand(f))
                    }
                })
                .collect()
        };
        let mut union: Vec<ReflectionAngle> = Vec::new();
        let mut why = None;
        for (((i, _), bits), got) in senders.iter().zip(&sent).zip(decoded) {
            let radar = self.radars[*i].cfg.id;
            let got = got.map_err(|e| why.get_or_insert(e.to_string()).clone()).ok();
            self.link(LinkDirection::RadarToIrs, radar, None, bit_stats(bits, got.as_deref()));
            let message = got.as_deref().and_then(|b| self.message_of(b).ok());
            match &message {
                Some(Message::AoiSet { angles }) => union.extend(angles),
                _ => {
                    why.get_or_insert_with(|| format!("radar {radar}: packet did not carry an AoI set"));
                }
            }
            rec.events.push(EventRecord {
                slot: Some(slot),
                kind: EventKind::AoiPacket { radar, sent: bits_to_string(bits), received: got.as_deref().map(bits_to_string), message },
            });
        }
        union.sort();
        union.dedup();
        Ok(if union.is_empty() {
            AdcOutcome::Malformed(why.unwrap_or_else(|| "nothing decoded".into()))
        } else {
            AdcOutcome::Signal(Some(Message::AoiSet { angles: union }))
        })
    }

    /// IRS announces `angle`; returns the radars that will sense and what
    /// they believe was announced.
    fn announce(&mut self, angle: ReflectionAngle, clock: &Clock, slot: usize, epoch: usize, rec: &mut EpochRecord) -> Result<Vec<(usize, ReflectionAngle, u32)>> {
        let irs_id = self.irs.as_ref().expect("announce needs an IRS").id;
        let bits = self.cfg.comms.packet.frame(&Message::AngleAnnounce { angle, irs_id_low: irs_id & 0b11 }.encode()?)?;
        let states: Vec<Option<IrsState>> = ook_modulate(irs_id, &bits).into_iter().map(Some).collect();
        let targets = self.world.targets_at(epoch, clock.time(slot));
        let mut sensing = Vec::new();
        for i in 0..self.radars.len() {
            let radar = self.radars[i].cfg.id;
            let tracked = match self.radars[i].fsm.phase {
                RadarPhase::Tracking { irs_id, .. } => Some(irs_id),
                RadarPhase::Chirping => None,
            };
            let mut decoded = None;
            let obs = match (self.radars[i].fix.as_ref().map(|f| f.range), tracked) {
                (Some(range), Some(id)) => {
                    let chirps = self.capture(i, &states, self.cps(), &targets)?;
                    let got = self.read_ook(&chirps, range).ok();
                    self.link(LinkDirection::IrsToRadar, radar, Some(angle), bit_stats(&bits, got.as_deref()));
                    decoded = got.as_deref().and_then(|b| self.message_of(b).ok());
                    match decoded {
                        Some(Message::AngleAnnounce { angle: a, irs_id_low }) if irs_id_low == id & 0b11 => RadarObservation::Angle(a),
                        _ => RadarObservation::NoOok,
                    }
                }
                _ => RadarObservation::NoOok,
            };
            rec.events.push(EventRecord { slot: Some(slot), kind: EventKind::Announce { radar, angle, decoded } });
            if let Some((believed, d)) = self.step(i, RadarEvent::RxFrame(obs), Some(slot), rec) {
                sensing.push((i, believed, d));
            }
        }
        Ok(sensing)
    }

    fn sensing_grid(&self, fix: &IrsFix) -> MusicGrid {
        let l = &self.cfg.locator;
        let g = l.grid;
        let half = l.irs_gate_deg + 2.0 * g.angle_step_deg;
        let c = fix.aoa.to_degrees();
        MusicGrid {
            range_min: (fix.range + l.min_leg - g.range_step).max(g.range_min),
            angle_min_deg: (c - half).max(-89.0),
            angle_max_deg: (c + half).min(89.0),
            ..g
        }
    }

    /// Radar `i` senses for `slots` slots believing the IRS reflects at
    /// `believed`; the board actually reflects at `actual`.
    #[allow(clippy::too_many_arguments)]
    fn sense(&mut self, i: usize, believed: ReflectionAngle, actual: ReflectionAngle, slots: u32, clock: &Clock, first: usize, epoch: usize) -> Result<()> {
        let Some(fix) = self.radars[i].fix.clone() else { return Ok(()) };
        let irs = self.world.irs.expect("sensing needs an IRS");
        let t_mid = clock.time(first) + slots as f64 * clock.slot_seconds / 2.0;
        let targets = self.world.targets_at(epoch, t_mid);
        let state = IrsState { id: self.irs.as_ref().map_or(0, |f| f.id), mode: IrsMode::Reflect(actual) };
        let chirps = self.capture(i, &[Some(state)], slots as usize * self.cps(), &targets)?;
        let site = self.radars[i].site.clone();

        let half_beam = (self.cfg.scheduler.delta_alpha_deg / 2.0).to_radians();
        let min_leg = self.cfg.locator.min_leg;
        let mut truths = Vec::new();
        for t in &targets {
            let Ok(ps) = path_between(site.position, irs.position, t.position) else { continue };
            truths.push((t.id, t.position, ps.d_rs + ps.d_st));
            if ps.alpha_defined
                && (ps.alpha_required - actual.radians()).abs() <= half_beam
                && ps.d_st > min_leg
                && !self.world.blocked(irs.position, t.position)
            {
                self.radars[i].expected.push((t.id, ps.d_rs + ps.d_st));
            }
        }

        let Ok(scan) = self.scan(&chirps, &self.sensing_grid(&fix)) else { return Ok(()) };
        let l = &self.cfg.locator;
        let best = classify_nlos(&scan.peaks, &fix.baseline, &l.classify)
            .into_iter()
            .filter(|(p, label)| {
                *label == PeakLabel::NlosViaIrs
                    && p.range > fix.range + l.min_leg
                    && (p.aoa - fix.aoa).abs() <= l.irs_gate_deg.to_radians()
                    && scan.snr_db(p) >= l.min_snr_db
            })
            .map(|(p, _)| p)
            .max_by(|a, b| a.power.total_cmp(&b.power));
        let Some(p) = best else { return Ok(()) };

        let rx0: Vec<IqFrame> = chirps.iter().map(|c| c[0].clone()).collect();
        let bin = (p.range / self.cfg.chirp.range_resolution()).round() as usize;
        let velocity = range_doppler(&rx0, &self.cfg.chirp).ok().and_then(|m| m.velocity_at_range_bin(bin)).unwrap_or(0.0);
        let estimate = localize_target(p.range, fix.range, believed.radians(), fix.phi, fix.position)?;
        self.radars[i].sensed.push(Sensed {
            angle: believed,
            t: t_mid,
            power: p.power,
            detection: TargetDetection { angle: believed, range: p.range, energy: 10f64.powf(p.power / 20.0), velocity },
            estimate,
            truths,
        });
        Ok(())
    }

    /// Resolves radar `i`'s sensing results for the super-frame and returns
    /// the detections handed to the scheduler.
    fn settle(&mut self, i: usize, rec: &mut EpochRecord) -> Vec<TargetDetection> {
        let radar = self.radars[i].cfg.id;
        let mut sensed = std::mem::take(&mut self.radars[i].sensed);
        let mut expected = std::mem::take(&mut self.radars[i].expected);
        // The same relay path seen through a neighbouring beam's sidelobe has
        // the same length; only the strongest sighting is kept.
        sensed.sort_by(|a, b| b.power.total_cmp(&a.power).then(a.angle.cmp(&b.angle)));
        let tol = self.cfg.locator.classify.range_tolerance;
        let mut kept: Vec<Sensed> = Vec::new();
        for s in sensed {
            if kept.iter().all(|k| (k.detection.range - s.detection.range).abs() > tol) {
                kept.push(s);
            }
        }
        kept.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.angle.cmp(&b.angle)));

        let bin = self.cfg.metrics.distance_bin;
        let mut matched = Vec::new();
        for s in &kept {
            let truth = s
                .truths
                .iter()
                .min_by(|a, b| a.1.distance(&s.estimate).total_cmp(&b.1.distance(&s.estimate)))
                .copied();
            if let Some((id, pos, dist)) = truth {
                let (dx, dy) = (s.estimate.x - pos.x, s.estimate.y - pos.y);
                let error = dx.hypot(dy);
                self.report.errors.entry(cell_mm(dist, bin)).or_default().push(ErrorSample { dx, dy, error });
                if error <= MATCH_RADIUS {
                    matched.push(id);
                }
            }
            rec.estimates.push(EstimateRecord {
                radar,
                angle: s.angle,
                t: s.t,
                detection: s.detection,
                estimate: [s.estimate.x, s.estimate.y],
                target: truth.map(|t| t.0),
                truth: truth.map(|t| [t.1.x, t.1.y]),
                true_distance: truth.map(|t| t.2),
            });
        }

        expected.sort_by(|a, b| a.0.cmp(&b.0));
        expected.dedup_by_key(|e| e.0);
        for &(id, dist) in &expected {
            if !matched.contains(&id) {
                *self.report.misses.entry(cell_mm(dist, bin)).or_default() += 1;
                rec.missed.push((id, dist));
            }
        }
        kept.iter().map(|s| s.detection).collect()
    }

    fn run_epoch(&mut self, epoch: usize) -> Result<EpochRecord> {
        let slot_seconds = self.cfg.scheduler.slot_seconds;
        let mut clock = Clock { t_start: self.t, slot_seconds, slots: String::new() };
        let mut rec = EpochRecord {
            scenario: self.cfg.name.clone(),
            epoch,
            t_start: self.t,
            mode: self.cfg.scheduler.mode,
            slots: String::new(),
            scan_seconds: 0.0,
            events: Vec::new(),
            estimates: Vec::new(),
            missed: Vec::new(),
        };
        let mut boot_slots = 0;

        match self.irs.clone() {
            None => {
                // Nothing answers: one listening slot per epoch.
                let s = clock.push(SlotKind::Comm);
                boot_slots = 1;
                for i in 0..self.radars.len() {
                    self.step(i, RadarEvent::RxFrame(RadarObservation::NoOok), Some(s), &mut rec);
                }
            }
            Some(fsm) => {
                let mut fsm = fsm;
                if fsm.phase == super::fsm::IrsPhase::Start {
                    let (next, actions) = irs_fsm_step(&fsm, &IrsEvent::SlotTick);
                    fsm = next;
                    for a in actions {
                        if let IrsAction::BroadcastId(id) = a {
                            let s = clock.push(SlotKind::Comm);
                            boot_slots += 1;
                            self.broadcast_id(id, &clock, s, epoch, &mut rec)?;
                        }
                    }
                }

                let senders: Vec<(usize, AngleDurationSet)> =
                    (0..self.radars.len()).filter_map(|i| self.radars[i].outbox.take().map(|s| (i, s))).collect();
                // Durations travel with the AoI out of band; the packet
                // carries only the angle bitmap.
                let mut durations: BTreeMap<ReflectionAngle, u32> = BTreeMap::new();
                for (_, set) in &senders {
                    for &(a, d) in set.entries() {
                        let e = durations.entry(a).or_insert(0);
                        *e = (*e).max(d);
                    }
                }
                let outcome = if senders.is_empty() {
                    AdcOutcome::Signal(None)
                } else {
                    let s = clock.push(SlotKind::RadarToIrs);
                    self.radar_to_irs(&senders, s, &mut rec)?
                };
                let (next, actions) = irs_fsm_step(&fsm, &IrsEvent::AdcSamples(outcome));
                self.irs = Some(next);

                let mut pending: Vec<(usize, ReflectionAngle, u32)> = Vec::new();
                for a in actions {
                    match a {
                        IrsAction::Warn(message) => rec.events.push(EventRecord { slot: None, kind: EventKind::IrsWarning { message } }),
                        IrsAction::Resample | IrsAction::BroadcastId(_) => {}
                        IrsAction::Announce(angle) => {
                            let s = clock.push(SlotKind::Comm);
                            pending = self.announce(angle, &clock, s, epoch, &mut rec)?;
                        }
                        IrsAction::Reflect(angle) => {
                            let d = durations.get(&angle).copied().unwrap_or(self.cfg.scheduler.naive_slots);
                            let first = clock.slots.len();
                            for _ in 0..d {
                                clock.push(SlotKind::Sensing);
                            }
                            for (i, believed, want) in std::mem::take(&mut pending) {
                                self.sense(i, believed, angle, want.min(d), &clock, first, epoch)?;
                            }
                        }
                    }
                }
            }
        }

        let end = clock.slots.len().checked_sub(1);
        for i in 0..self.radars.len() {
            let dets = self.settle(i, &mut rec);
            self.step(i, RadarEvent::SuperframeEnd(dets), end, &mut rec);
        }
        self.warn_shared_beams(&mut rec);

        rec.scan_seconds = (clock.slots.len() - boot_slots) as f64 * slot_seconds;
        self.t += clock.slots.len() as f64 * slot_seconds;
        rec.slots = clock.slots;
        Ok(rec)
    }

    /// Two targets inside one beam can only be reported as one.
    fn warn_shared_beams(&self, rec: &mut EpochRecord) {
        let Some(irs) = self.world.irs else { return };
        let half = (self.cfg.scheduler.delta_alpha_deg / 2.0).to_radians();
        let t = rec.t_start;
        let targets = self.world.targets_at(rec.epoch, t);
        for r in &self.radars {
            for a in r.fsm.aoi.angles() {
                let n = targets
                    .iter()
                    .filter(|tg| {
                        path_between(r.site.position, irs.position, tg.position)
                            .is_ok_and(|ps| ps.alpha_defined && (ps.alpha_required - a.radians()).abs() <= half)
                    })
                    .count();
                if n > 1 {
                    rec.events.push(EventRecord {
                        slot: None,
                        kind: EventKind::RadarWarning { radar: r.cfg.id, message: format!("{n} targets share the {a} beam; only the strongest is reported") },
                    });
                }
            }
        }
    }
}
