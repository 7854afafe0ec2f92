use nlos_irs::geometry::{path_between, Point2};
use nlos_irs::irs::ReflectionAngle;
use nlos_irs::locator::{classify_nlos, localize_target, split_relay_path, ClassifyConfig, MusicPeak, PeakLabel};
use nlos_irs::scheduler::{AngleDurationSet, AoiParams, TargetDetection};
use nlos_irs::simkit::config::ScheduleMode;
use nlos_irs::simkit::fsm::*;
use nlos_irs::simkit::Message;
use nlos_irs::Error;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point2> {
    (-6.0f64..6.0, -6.0f64..6.0).prop_map(|(x, y)| Point2::new(x, y))
}

fn angle() -> impl Strategy<Value = ReflectionAngle> {
    (0usize..4).prop_map(|i| ReflectionAngle::from_index(i).unwrap())
}

fn peak() -> impl Strategy<Value = MusicPeak> {
    (0.3f64..6.0, -1.0f64..1.0, -40.0f64..0.0).prop_map(|(range, aoa, power)| MusicPeak { range, aoa, power })
}

fn adc() -> impl Strategy<Value = IrsEvent> {
    prop_oneof![
        Just(IrsEvent::SlotTick),
        Just(IrsEvent::AdcSamples(AdcOutcome::Silence)),
        Just(IrsEvent::AdcSamples(AdcOutcome::Malformed("x".into()))),
        Just(IrsEvent::AdcSamples(AdcOutcome::Signal(None))),
        proptest::collection::vec(angle(), 0..4)
            .prop_map(|angles| IrsEvent::AdcSamples(AdcOutcome::Signal(Some(Message::AoiSet { angles })))),
    ]
}

fn radar_event() -> impl Strategy<Value = RadarEvent> {
    prop_oneof![
        Just(RadarEvent::SlotTick),
        Just(RadarEvent::RxFrame(RadarObservation::NoOok)),
        (0u8..16).prop_map(|id| RadarEvent::RxFrame(RadarObservation::IrsId(id))),
        angle().prop_map(|a| RadarEvent::RxFrame(RadarObservation::Angle(a))),
        proptest::collection::vec((angle(), 0.5f64..5.0, 0.01f64..1.0), 0..3).prop_map(|v| {
            RadarEvent::SuperframeEnd(
                v.into_iter().map(|(angle, range, energy)| TargetDetection { angle, range, energy, velocity: 0.0 }).collect(),
            )
        }),
    ]
}

proptest! {
    #[test]
    fn relay_geometry_round_trip(radar in point(), irs in point(), target in point()) {
        prop_assume!(radar.distance(&irs) > 0.1 && irs.distance(&target) > 0.1 && radar.distance(&target) > 0.1);
        let p = path_between(radar, irs, target).unwrap();
        let est = localize_target(p.d_rs + p.d_st, p.d_rs, p.alpha_required, p.phi, irs).unwrap();
        prop_assert!(est.distance(&target) < 1e-9);
    }

    #[test]
    fn relay_path_splits_into_legs(d_rs in 0.1f64..10.0, d_st in 0.0f64..10.0) {
        let got = split_relay_path(d_rs + d_st, d_rs).unwrap();
        prop_assert!((got - d_st).abs() < 1e-12);
        let short = d_rs * 0.5;
        prop_assert!(matches!(split_relay_path(short, d_rs), Err(Error::NegativeLeg { .. })), "short path must be rejected");
    }

    #[test]
    fn persisting_peaks_are_never_nlos(on in proptest::collection::vec(peak(), 1..6), keep in proptest::collection::vec(any::<bool>(), 6)) {
        let off: Vec<MusicPeak> = on.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
        for (p, label) in classify_nlos(&on, &off, &ClassifyConfig::default()) {
            if off.contains(&p) {
                prop_assert_eq!(label, PeakLabel::LoS);
            }
        }
    }

    #[test]
    fn irs_reflects_only_what_it_announces(events in proptest::collection::vec(adc(), 1..12)) {
        let mut s = IrsFsm::new(3, vec![ReflectionAngle::Deg30, ReflectionAngle::Deg60]);
        for (i, e) in events.iter().enumerate() {
            let (next, actions) = irs_fsm_step(&s, e);
            prop_assert_eq!(actions.iter().filter(|a| matches!(a, IrsAction::BroadcastId(_))).count(), usize::from(i == 0));
            for w in actions.windows(2) {
                if let IrsAction::Announce(a) = w[0] {
                    prop_assert_eq!(&w[1], &IrsAction::Reflect(a));
                    prop_assert!(s.angles.contains(&a));
                }
            }
            s = next;
        }
    }

    #[test]
    fn radar_senses_only_inside_its_aoi(events in proptest::collection::vec(radar_event(), 1..16)) {
        let mut s = RadarFsm::new(ScheduleMode::Adaptive, &ReflectionAngle::ALL, 10, AoiParams::default(), 3).unwrap();
        for e in &events {
            let (next, actions) = radar_fsm_step(&s, e);
            for a in &actions {
                if let RadarAction::Sense(angle, d) = a {
                    prop_assert_eq!(s.aoi.duration(*angle), Some(*d));
                    prop_assert!(matches!(s.phase, RadarPhase::Tracking { .. }), "sensing while chirping");
                }
            }
            if next.phase == RadarPhase::Chirping && matches!(s.phase, RadarPhase::Tracking { .. }) {
                prop_assert_eq!(&next.aoi, &AngleDurationSet::uniform(10).unwrap());
            }
            s = next;
        }
    }
}
