mod common;

use common::{all_scenarios, scenario};
use nlos_irs::simkit::config::ScheduleMode;
use nlos_irs::simkit::metrics::{EventKind, LinkDirection, SlotKind};
use nlos_irs::simkit::{emit_reports, run_scenario, run_sweep};
use nlos_irs::Error;

#[test]
fn noiseless_static_target_is_exact_and_faster_than_naive() {
    let mut cfg = scenario("table3_single");
    cfg.channel.snr_db = f64::INFINITY;
    cfg.channel.envelope_snr_db = f64::INFINITY;
    let adaptive = run_scenario(&cfg).unwrap();
    let cell = cfg.locator.grid.range_step;
    for (_, m) in adaptive.median_errors() {
        assert!(m < cell, "median {m} m");
    }
    cfg.scheduler.mode = ScheduleMode::Naive;
    let naive = run_scenario(&cfg).unwrap();
    assert!(adaptive.mean_scan_time().unwrap() < naive.mean_scan_time().unwrap());
}

#[test]
fn without_irs_the_radar_only_chirps() {
    let r = run_scenario(&scenario("irs_absent")).unwrap();
    assert!(r.errors.is_empty());
    assert!(r.scan_times.is_empty());
    for e in &r.epochs {
        assert!(e.estimates.is_empty());
        assert_eq!(e.slots, "C");
        assert!(e.events.is_empty(), "{:?}", e.events);
    }
}

#[test]
fn two_radars_decode_without_crosstalk() {
    let r = run_scenario(&scenario("two_radars")).unwrap();
    let mut seen = [false; 2];
    for (k, v) in &r.links {
        assert_eq!(v.bit_errors, 0, "{k:?}");
        if k.direction == LinkDirection::RadarToIrs {
            seen[usize::from(k.radar - 1)] = true;
        }
    }
    assert_eq!(seen, [true, true]);
    assert!(r.epochs.iter().all(|e| !e.estimates.is_empty()));
}

#[test]
fn events_sit_in_matching_slots() {
    let r = run_sweep(&all_scenarios()).unwrap();
    for e in &r.epochs {
        let slots: Vec<char> = e.slots.chars().collect();
        for ev in &e.events {
            if let (Some(kind), Some(i)) = (ev.kind.required_slot(), ev.slot) {
                assert_eq!(slots[i], kind.code(), "{} epoch {}: {:?} in {}", e.scenario, e.epoch, ev.kind, e.slots);
            }
            if let EventKind::Sense { slots: n, .. } = ev.kind {
                let i = ev.slot.unwrap();
                assert!(slots[i..i + n as usize].iter().all(|&c| c == SlotKind::Sensing.code()));
            }
        }
    }
}

#[test]
fn adaptive_never_scans_longer_than_naive() {
    for cfg in all_scenarios() {
        if cfg.irs.is_none() || cfg.scheduler.mode == ScheduleMode::Naive {
            continue;
        }
        let adaptive = run_scenario(&cfg).unwrap().mean_scan_time().unwrap();
        let mut naive_cfg = cfg.clone();
        naive_cfg.scheduler.mode = ScheduleMode::Naive;
        let naive = run_scenario(&naive_cfg).unwrap().mean_scan_time().unwrap();
        assert!(adaptive <= naive, "{}: {adaptive} > {naive}", cfg.name);
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("walking");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(run.to_string());
        emit_reports(&run_scenario(&cfg).unwrap(), &out).unwrap();
        let files: Vec<Vec<u8>> =
            ["metrics.csv", "cdf.csv", "epochs.jsonl", "summary.txt"].iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_changes_the_noise() {
    let mut cfg = scenario("localization");
    cfg.epochs = 10;
    let a = run_scenario(&cfg).unwrap().metrics_csv();
    cfg.seed += 1;
    assert_ne!(a, run_scenario(&cfg).unwrap().metrics_csv());
}

#[test]
fn sweep_merge_is_order_independent() {
    let cfgs = all_scenarios();
    let mut reversed = cfgs.clone();
    reversed.reverse();
    assert_eq!(run_sweep(&cfgs).unwrap().metrics_csv(), run_sweep(&reversed).unwrap().metrics_csv());
}

#[test]
fn duplicate_names_rejected() {
    let cfg = scenario("table3_single");
    assert!(matches!(run_sweep(&[cfg.clone(), cfg]), Err(Error::Config { .. })));
}

#[test]
fn bad_config_names_the_field() {
    let mut cfg = scenario("localization");
    cfg.radars[0].switching_hz = -1.0;
    match run_scenario(&cfg) {
        Err(Error::Config { path, .. }) => assert!(path.contains("switching_hz"), "{path}"),
        other => panic!("expected config error, got {other:?}"),
    }
}
