//! IRS and radar protocol state machines. Both are pure: a step takes the
//! current state and one event and returns the next state and the actions to
//! carry out, in order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irs::ReflectionAngle;
use crate::scheduler::{build_aoi, AngleDurationSet, AoiParams, TargetDetection};

use super::codebook::Message;
use super::config::ScheduleMode;

/// What one round of IRS ADC sampling yielded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AdcOutcome {
    Silence,
    /// A radar signal, with the message it carried if one was decoded.
    Signal(Option<Message>),
    /// A radar signal whose packet failed to decode.
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IrsEvent {
    SlotTick,
    AdcSamples(AdcOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IrsAction {
    BroadcastId(u8),
    Resample,
    /// OOK-broadcast the angle in retro mode.
    Announce(ReflectionAngle),
    /// Switch the lines to reflect at the angle.
    Reflect(ReflectionAngle),
    Warn(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrsPhase {
    Start,
    Listening,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrsFsm {
    pub id: u8,
    /// Supported angles, in board order.
    pub angles: Vec<ReflectionAngle>,
    pub phase: IrsPhase,
}

impl IrsFsm {
    pub fn new(id: u8, mut angles: Vec<ReflectionAngle>) -> Self {
        angles.sort();
        angles.dedup();
        Self { id, angles, phase: IrsPhase::Start }
    }
}

pub fn irs_fsm_step(state: &IrsFsm, event: &IrsEvent) -> (IrsFsm, Vec<IrsAction>) {
    let mut next = state.clone();
    let mut actions = Vec::new();
    if state.phase == IrsPhase::Start {
        actions.push(IrsAction::BroadcastId(state.id));
        next.phase = IrsPhase::Listening;
    }
    match event {
        IrsEvent::SlotTick => {}
        IrsEvent::AdcSamples(AdcOutcome::Silence) => actions.push(IrsAction::Resample),
        IrsEvent::AdcSamples(AdcOutcome::Malformed(why)) => {
            actions.push(IrsAction::Warn(format!("ignoring malformed packet: {why}")));
            actions.push(IrsAction::Resample);
        }
        IrsEvent::AdcSamples(AdcOutcome::Signal(msg)) => {
            let aoi: Vec<ReflectionAngle> = match msg {
                Some(Message::AoiSet { angles }) => {
                    state.angles.iter().copied().filter(|a| angles.contains(a)).collect()
                }
                _ => state.angles.clone(),
            };
            for a in aoi {
                actions.push(IrsAction::Announce(a));
                actions.push(IrsAction::Reflect(a));
            }
        }
    }
    (next, actions)
}

/// What the radar made of one received frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadarObservation {
    NoOok,
    IrsId(u8),
    Angle(ReflectionAngle),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadarEvent {
    SlotTick,
    RxFrame(RadarObservation),
    SuperframeEnd(Vec<TargetDetection>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadarAction {
    Chirp,
    SendAoi(AngleDurationSet),
    /// Run 2D-MUSIC over the given number of sensing slots.
    Sense(ReflectionAngle, u32),
    Wait(ReflectionAngle),
    NewAoi(AngleDurationSet),
    /// The schedule was infeasible; carries the clamped total.
    FallBackToNaive { max_feasible_d_scan: u32 },
    IrsLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadarPhase {
    Chirping,
    Tracking { irs_id: u8, missed: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarFsm {
    pub phase: RadarPhase,
    pub mode: ScheduleMode,
    pub aoi: AngleDurationSet,
    pub params: AoiParams,
    pub naive: AngleDurationSet,
    pub lost_after: u32,
}

impl RadarFsm {
    /// Starts chirping with the full uniform scan as its AoI.
    pub fn new(mode: ScheduleMode, angles: &[ReflectionAngle], naive_slots: u32, params: AoiParams, lost_after: u32) -> Result<Self> {
        let naive = AngleDurationSet::new(angles.iter().map(|&a| (a, naive_slots)).collect())?;
        if naive.is_empty() {
            return Err(Error::InvalidParameter("radar needs at least one angle".into()));
        }
        Ok(Self { phase: RadarPhase::Chirping, mode, aoi: naive.clone(), params, naive, lost_after })
    }

    fn announce_aoi(&self) -> RadarAction {
        match self.mode {
            ScheduleMode::Adaptive => RadarAction::SendAoi(self.aoi.clone()),
            ScheduleMode::Naive => RadarAction::Chirp,
        }
    }
}

pub fn radar_fsm_step(state: &RadarFsm, event: &RadarEvent) -> (RadarFsm, Vec<RadarAction>) {
    let mut next = state.clone();
    let mut actions = Vec::new();
    match (state.phase, event) {
        (_, RadarEvent::SlotTick) => {}
        (RadarPhase::Chirping, RadarEvent::RxFrame(RadarObservation::IrsId(id))) => {
            next.phase = RadarPhase::Tracking { irs_id: *id, missed: 0 };
            actions.push(next.announce_aoi());
        }
        (RadarPhase::Chirping, RadarEvent::RxFrame(_)) | (RadarPhase::Chirping, RadarEvent::SuperframeEnd(_)) => {
            actions.push(RadarAction::Chirp);
        }
        (RadarPhase::Tracking { irs_id, .. }, RadarEvent::RxFrame(obs)) => match obs {
            RadarObservation::IrsId(id) => {
                next.phase = RadarPhase::Tracking { irs_id: *id, missed: 0 };
                actions.push(next.announce_aoi());
            }
            RadarObservation::Angle(a) => {
                next.phase = RadarPhase::Tracking { irs_id, missed: 0 };
                match state.aoi.duration(*a) {
                    Some(d) => actions.push(RadarAction::Sense(*a, d)),
                    None => actions.push(RadarAction::Wait(*a)),
                }
            }
            RadarObservation::NoOok => {
                let missed = match state.phase {
                    RadarPhase::Tracking { missed, .. } => missed + 1,
                    RadarPhase::Chirping => unreachable!(),
                };
                if missed >= state.lost_after {
                    next.phase = RadarPhase::Chirping;
                    next.aoi = state.naive.clone();
                    actions.push(RadarAction::IrsLost);
                    actions.push(RadarAction::Chirp);
                } else {
                    next.phase = RadarPhase::Tracking { irs_id, missed };
                    actions.push(RadarAction::Chirp);
                }
            }
        },
        (RadarPhase::Tracking { .. }, RadarEvent::SuperframeEnd(detections)) => {
            let set = match state.mode {
                ScheduleMode::Naive => state.naive.clone(),
                ScheduleMode::Adaptive => match build_aoi(detections, &state.aoi, &state.params) {
                    Ok(set) => set,
                    Err(Error::InfeasibleSchedule { max_feasible_d_scan, .. }) => {
                        actions.push(RadarAction::FallBackToNaive { max_feasible_d_scan });
                        state.naive.clone()
                    }
                    Err(e) => {
                        actions.push(RadarAction::FallBackToNaive { max_feasible_d_scan: 0 });
                        debug_assert!(false, "build_aoi rejected engine detections: {e}");
                        state.naive.clone()
                    }
                },
            };
            next.aoi = set.clone();
            actions.push(RadarAction::NewAoi(set));
            actions.push(next.announce_aoi());
        }
    }
    (next, actions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ReflectionAngle::*;

    fn irs() -> IrsFsm {
        let (s, a) = irs_fsm_step(&IrsFsm::new(3, ReflectionAngle::ALL.to_vec()), &IrsEvent::SlotTick);
        assert_eq!(a, [IrsAction::BroadcastId(3)]);
        s
    }

    #[test]
    fn irs_aoi_subset() {
        let ev = IrsEvent::AdcSamples(AdcOutcome::Signal(Some(Message::AoiSet { angles: vec![Deg45] })));
        let (_, a) = irs_fsm_step(&irs(), &ev);
        assert_eq!(a, [IrsAction::Announce(Deg45), IrsAction::Reflect(Deg45)]);
    }

    #[test]
    fn irs_without_aoi_scans_all() {
        let (_, a) = irs_fsm_step(&irs(), &IrsEvent::AdcSamples(AdcOutcome::Signal(None)));
        let want: Vec<IrsAction> =
            ReflectionAngle::ALL.iter().flat_map(|&x| [IrsAction::Announce(x), IrsAction::Reflect(x)]).collect();
        assert_eq!(a, want);
    }

    #[test]
    fn irs_silence_and_garbage() {
        let (_, a) = irs_fsm_step(&irs(), &IrsEvent::AdcSamples(AdcOutcome::Silence));
        assert_eq!(a, [IrsAction::Resample]);
        let (_, a) = irs_fsm_step(&irs(), &IrsEvent::AdcSamples(AdcOutcome::Malformed("prefix".into())));
        assert!(matches!(a[0], IrsAction::Warn(_)) && a[1] == IrsAction::Resample);
    }

    fn radar() -> RadarFsm {
        RadarFsm::new(ScheduleMode::Adaptive, &ReflectionAngle::ALL, 10, AoiParams::default(), 2).unwrap()
    }

    #[test]
    fn radar_id_then_aoi() {
        let (s, a) = radar_fsm_step(&radar(), &RadarEvent::RxFrame(RadarObservation::IrsId(3)));
        assert_eq!(s.phase, RadarPhase::Tracking { irs_id: 3, missed: 0 });
        assert_eq!(a, [RadarAction::SendAoi(AngleDurationSet::uniform(10).unwrap())]);
    }

    #[test]
    fn radar_skips_outside_aoi() {
        let (mut s, _) = radar_fsm_step(&radar(), &RadarEvent::RxFrame(RadarObservation::IrsId(3)));
        s.aoi = AngleDurationSet::new(vec![(Deg60, 4)]).unwrap();
        let (_, a) = radar_fsm_step(&s, &RadarEvent::RxFrame(RadarObservation::Angle(Deg30)));
        assert_eq!(a, [RadarAction::Wait(Deg30)]);
        let (_, a) = radar_fsm_step(&s, &RadarEvent::RxFrame(RadarObservation::Angle(Deg60)));
        assert_eq!(a, [RadarAction::Sense(Deg60, 4)]);
    }

    #[test]
    fn radar_loses_irs() {
        let (s, _) = radar_fsm_step(&radar(), &RadarEvent::RxFrame(RadarObservation::IrsId(3)));
        let (s, a) = radar_fsm_step(&s, &RadarEvent::RxFrame(RadarObservation::NoOok));
        assert_eq!(a, [RadarAction::Chirp]);
        let (s, a) = radar_fsm_step(&s, &RadarEvent::RxFrame(RadarObservation::NoOok));
        assert_eq!(a, [RadarAction::IrsLost, RadarAction::Chirp]);
        assert_eq!(s.phase, RadarPhase::Chirping);
    }

    #[test]
    fn radar_new_aoi_at_superframe_end() {
        let (s, _) = radar_fsm_step(&radar(), &RadarEvent::RxFrame(RadarObservation::IrsId(3)));
        let det = TargetDetection { angle: Deg45, range: 3.0, energy: 1.0, velocity: 0.0 };
        let (s, a) = radar_fsm_step(&s, &RadarEvent::SuperframeEnd(vec![det]));
        let want = AngleDurationSet::new(vec![(Deg45, 9)]).unwrap();
        assert_eq!(a, [RadarAction::NewAoi(want.clone()), RadarAction::SendAoi(want.clone())]);
        assert_eq!(s.aoi, want);
    }

    #[test]
    fn radar_falls_back_when_too_fast() {
        let (s, _) = radar_fsm_step(&radar(), &RadarEvent::RxFrame(RadarObservation::IrsId(3)));
        let det = TargetDetection { angle: Deg45, range: 3.0, energy: 1.0, velocity: 1.0 };
        let (s, a) = radar_fsm_step(&s, &RadarEvent::SuperframeEnd(vec![det]));
        assert!(matches!(a[0], RadarAction::FallBackToNaive { max_feasible_d_scan: 4 }));
        assert_eq!(s.aoi, AngleDurationSet::uniform(10).unwrap());
    }
}
