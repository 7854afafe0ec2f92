//! Two radars talk to one IRS at once on different antenna switching rates.
//! The IRS finds both rates in its envelope trace and decodes each radar
//! from its own band.

use nlos_irs::comms::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nlos_irs::Result<()> {
    let n_r = 8;
    let a: Vec<bool> = [true, false, true, true].into();
    let b: Vec<bool> = [true, false, false, true, true, false, true, false].into();
    let txs = [
        Transmission { plan: RadarTxPlan::new(1.0, n_r, 0.3, 1.0, a.clone()), link: RadarLink::at_distance(1.0), start: 0.0 },
        Transmission { plan: RadarTxPlan::new(2.0, n_r, 0.3, 1.0, b.clone()), link: RadarLink::at_distance(1.3), start: 0.0 },
    ];
    let mut trace = IrsFrontEnd::default().receive(&txs, 64.0)?;
    let sigma = noise_sigma_for_snr(&trace, 20.0);
    trace.add_noise(sigma, &mut ChaCha8Rng::seed_from_u64(4));

    let found = detect_radars(&trace, &DetectConfig::default())?;
    println!("switching rates found: {found:?} Hz");
    for (f, sent) in [(1.0, &a), (2.0, &b)] {
        let own = separate_radar(&trace, f)?;
        let got = decode_bits(&own, &BitTiming { f, n_r }, &[true])?;
        println!("F = {f} Hz: sent {} decoded {}", bits_to_string(sent), bits_to_string(&got));
    }
    Ok(())
}
