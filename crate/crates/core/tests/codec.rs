use nlos_irs::comms::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stack(f: f64, payload: u8, lead: f64) -> Vec<bool> {
    let fmt = PacketFormat::default();
    let bits = fmt.frame(&payload_from_u8(payload)).unwrap();
    let plan = RadarTxPlan::new(f, 1, 0.3, 1.0, bits);
    let dur = lead + plan.duration() + plan.bit_seconds();
    let tx = Transmission { plan, link: RadarLink::at_distance(1.0), start: lead };
    let trace = IrsFrontEnd::default().receive(&[tx], dur).unwrap();
    let timing = BitTiming { f, n_r: 1 };
    let off = sync_align(&trace, &timing, &fmt.prefix(), &SyncConfig::default()).unwrap();
    let rx = decode_bits(&trace.skip(off), &timing, &fmt.prefix()).unwrap();
    rx[..fmt.packet_len()].to_vec()
}

#[test]
fn noiseless_full_stack_all_payloads() {
    for f in [1.0, 2.0, 5.0, 10.0, 20.0] {
        for p in 0..64u8 {
            let rx = stack(f, p, 0.37);
            let back = deframe_packet(&rx).unwrap_or_else(|e| panic!("F={f} p={p}: {e} {}", bits_to_string(&rx)));
            assert_eq!(payload_to_u8(&back), p, "F={f}");
        }
    }
}

fn pattern(n: usize) -> Vec<bool> {
    (0..n).map(|i| i % 2 == 0).collect()
}

fn two_radar_trace(seed: u64, snr_db: f64) -> EnvelopeTrace {
    let n_r = 8;
    let txs = [
        Transmission { plan: RadarTxPlan::new(1.0, n_r, 0.3, 1.0, pattern(4)), link: RadarLink::at_distance(1.0), start: 0.0 },
        Transmission { plan: RadarTxPlan::new(2.0, n_r, 0.3, 1.0, pattern(8)), link: RadarLink::at_distance(1.1), start: 0.0 },
    ];
    let mut tr = IrsFrontEnd::default().receive(&txs, 64.0).unwrap();
    let sigma = noise_sigma_for_snr(&tr, snr_db);
    tr.add_noise(sigma, &mut ChaCha8Rng::seed_from_u64(seed));
    tr
}

#[test]
fn two_radars_detected_and_separated() {
    for seed in 0..10 {
        let tr = two_radar_trace(seed, 20.0);
        let found = detect_radars(&tr, &DetectConfig::default()).unwrap();
        assert_eq!(found, [1.0, 2.0], "seed {seed}");
        for (f, n) in [(1.0, 4), (2.0, 8)] {
            let sep = separate_radar(&tr, f).unwrap();
            let rx = decode_bits(&sep, &BitTiming { f, n_r: 8 }, &[true, false]).unwrap();
            assert_eq!(rx, pattern(n), "seed {seed} F={f}");
        }
    }
}
