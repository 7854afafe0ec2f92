//! Scripted event traces for both protocol state machines, each step paired
//! with the exact action list it must produce.

use serde::Serialize;

use crate::irs::ReflectionAngle::{self, *};
use crate::scheduler::{AngleDurationSet, AoiParams, TargetDetection};

use super::codebook::Message;
use super::config::ScheduleMode;
use super::fsm::*;

/// One step of a script: the event fed in and the actions expected back.
pub type Step<E, A> = (E, Vec<A>);

pub enum Script {
    Irs { start: IrsFsm, steps: Vec<Step<IrsEvent, IrsAction>> },
    Radar { start: RadarFsm, steps: Vec<Step<RadarEvent, RadarAction>> },
}

pub struct Transcript {
    pub name: &'static str,
    pub script: Script,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptResult {
    pub name: &'static str,
    pub steps: usize,
    /// First mismatching step, rendered as expected vs. actual.
    pub mismatch: Option<String>,
}

impl TranscriptResult {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn play<S, E, A: PartialEq + std::fmt::Debug>(
    mut state: S,
    steps: &[Step<E, A>],
    step: impl Fn(&S, &E) -> (S, Vec<A>),
) -> Option<String> {
    for (i, (event, want)) in steps.iter().enumerate() {
        let (next, got) = step(&state, event);
        if &got != want {
            return Some(format!("step {i}: expected {want:?}, got {got:?}"));
        }
        state = next;
    }
    None
}

impl Transcript {
    pub fn run(&self) -> TranscriptResult {
        let (steps, mismatch) = match &self.script {
            Script::Irs { start, steps } => (steps.len(), play(start.clone(), steps, irs_fsm_step)),
            Script::Radar { start, steps } => (steps.len(), play(start.clone(), steps, radar_fsm_step)),
        };
        TranscriptResult { name: self.name, steps, mismatch }
    }
}

const IRS_ID: u8 = 3;

fn irs() -> IrsFsm {
    IrsFsm::new(IRS_ID, ReflectionAngle::ALL.to_vec())
}

fn adc(outcome: AdcOutcome) -> IrsEvent {
    IrsEvent::AdcSamples(outcome)
}

fn radar(mode: ScheduleMode) -> RadarFsm {
    RadarFsm::new(mode, &ReflectionAngle::ALL, 10, AoiParams::default(), 3).expect("valid radar")
}

fn rx(obs: RadarObservation) -> RadarEvent {
    RadarEvent::RxFrame(obs)
}

fn set(entries: &[(ReflectionAngle, u32)]) -> AngleDurationSet {
    AngleDurationSet::new(entries.to_vec()).expect("valid set")
}

fn both(a: ReflectionAngle) -> [IrsAction; 2] {
    [IrsAction::Announce(a), IrsAction::Reflect(a)]
}

/// The full suite, in a fixed order.
pub fn transcripts() -> Vec<Transcript> {
    use IrsAction::*;
    use RadarAction::*;
    use RadarObservation::*;

    let uniform = AngleDurationSet::uniform(10).expect("valid set");
    let one_target = vec![TargetDetection { angle: Deg45, range: 3.0, energy: 1.0, velocity: 0.0 }];
    let every_angle: Vec<IrsAction> = ReflectionAngle::ALL.into_iter().flat_map(both).collect();

    vec![
        Transcript {
            name: "irs_aoi_present",
            script: Script::Irs {
                start: irs(),
                steps: vec![
                    (IrsEvent::SlotTick, vec![BroadcastId(IRS_ID)]),
                    (adc(AdcOutcome::Signal(Some(Message::AoiSet { angles: vec![Deg45] }))), both(Deg45).to_vec()),
                    (
                        adc(AdcOutcome::Signal(Some(Message::AoiSet { angles: vec![Deg75, Deg30] }))),
                        [both(Deg30), both(Deg75)].concat(),
                    ),
                ],
            },
        },
        Transcript {
            name: "irs_aoi_absent",
            script: Script::Irs {
                start: irs(),
                steps: vec![
                    (IrsEvent::SlotTick, vec![BroadcastId(IRS_ID)]),
                    (adc(AdcOutcome::Signal(None)), every_angle.clone()),
                    (adc(AdcOutcome::Signal(Some(Message::IdAnnounce { irs_id: 1 }))), every_angle.clone()),
                ],
            },
        },
        Transcript {
            name: "irs_first_signal_before_tick",
            script: Script::Irs {
                start: irs(),
                steps: vec![(adc(AdcOutcome::Signal(None)), [vec![BroadcastId(IRS_ID)], every_angle].concat())],
            },
        },
        Transcript {
            name: "irs_silence",
            script: Script::Irs {
                start: irs(),
                steps: vec![
                    (IrsEvent::SlotTick, vec![BroadcastId(IRS_ID)]),
                    (adc(AdcOutcome::Silence), vec![Resample]),
                    (adc(AdcOutcome::Silence), vec![Resample]),
                    (IrsEvent::SlotTick, vec![]),
                ],
            },
        },
        Transcript {
            name: "irs_malformed_packet",
            script: Script::Irs {
                start: irs(),
                steps: vec![
                    (IrsEvent::SlotTick, vec![BroadcastId(IRS_ID)]),
                    (
                        adc(AdcOutcome::Malformed("bad prefix".into())),
                        vec![Warn("ignoring malformed packet: bad prefix".into()), Resample],
                    ),
                ],
            },
        },
        Transcript {
            name: "radar_id_decode",
            script: Script::Radar {
                start: radar(ScheduleMode::Adaptive),
                steps: vec![
                    (RadarEvent::SlotTick, vec![]),
                    (rx(NoOok), vec![Chirp]),
                    (rx(IrsId(IRS_ID)), vec![SendAoi(uniform.clone())]),
                    (rx(Angle(Deg30)), vec![Sense(Deg30, 10)]),
                ],
            },
        },
        Transcript {
            name: "radar_out_of_aoi_skip",
            script: Script::Radar {
                start: radar(ScheduleMode::Adaptive),
                steps: vec![
                    (rx(IrsId(IRS_ID)), vec![SendAoi(uniform.clone())]),
                    (
                        RadarEvent::SuperframeEnd(one_target.clone()),
                        vec![NewAoi(set(&[(Deg45, 9)])), SendAoi(set(&[(Deg45, 9)]))],
                    ),
                    (rx(Angle(Deg30)), vec![Wait(Deg30)]),
                    (rx(Angle(Deg45)), vec![Sense(Deg45, 9)]),
                    (rx(Angle(Deg75)), vec![Wait(Deg75)]),
                ],
            },
        },
        Transcript {
            name: "radar_irs_lost",
            script: Script::Radar {
                start: radar(ScheduleMode::Adaptive),
                steps: vec![
                    (rx(IrsId(IRS_ID)), vec![SendAoi(uniform.clone())]),
                    (RadarEvent::SuperframeEnd(one_target), vec![NewAoi(set(&[(Deg45, 9)])), SendAoi(set(&[(Deg45, 9)]))]),
                    (rx(NoOok), vec![Chirp]),
                    (rx(NoOok), vec![Chirp]),
                    (rx(NoOok), vec![IrsLost, Chirp]),
                    (rx(Angle(Deg45)), vec![Chirp]),
                    (rx(IrsId(IRS_ID)), vec![SendAoi(uniform.clone())]),
                ],
            },
        },
        Transcript {
            name: "radar_naive_mode",
            script: Script::Radar {
                start: radar(ScheduleMode::Naive),
                steps: vec![
                    (rx(IrsId(IRS_ID)), vec![Chirp]),
                    (rx(Angle(Deg60)), vec![Sense(Deg60, 10)]),
                    (RadarEvent::SuperframeEnd(vec![]), vec![NewAoi(uniform.clone()), Chirp]),
                ],
            },
        },
    ]
}

pub fn run_conformance() -> Vec<TranscriptResult> {
    transcripts().iter().map(Transcript::run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for r in run_conformance() {
            assert!(r.passed(), "{}: {}", r.name, r.mismatch.unwrap());
        }
    }

    #[test]
    fn wrong_expectation_is_reported() {
        let t = Transcript {
            name: "broken",
            script: Script::Irs { start: irs(), steps: vec![(IrsEvent::SlotTick, vec![IrsAction::Resample])] },
        };
        let r = t.run();
        assert!(r.mismatch.unwrap().starts_with("step 0"));
    }
}
