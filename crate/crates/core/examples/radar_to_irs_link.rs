//! Radar-to-IRS downlink: frame a payload, drive the two transmit antennas,
//! pass it through the IRS envelope detector, then sync and decode. Also
//! prints the bit error rate as the radar moves away under fixed noise.

use nlos_irs::comms::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nlos_irs::Result<()> {
    let fmt = PacketFormat::default();
    let payload = payload_from_u8(0b10_1101);
    let bits = fmt.frame(&payload)?;
    let (f, n_r) = (5.0, 2);
    println!("packet {} at F = {f} Hz, N_r = {n_r}: {:.3} bps", bits_to_string(&bits), data_rate(f, n_r)?);

    let lead = 0.4;
    let plan = RadarTxPlan::new(f, n_r, 0.3, 1.0, bits.clone());
    let duration = lead + plan.duration() + plan.bit_seconds();
    let tx = Transmission { plan, link: RadarLink::at_distance(1.2), start: lead };
    let mut trace = IrsFrontEnd::default().receive(&[tx], duration)?;
    let sigma = noise_sigma_for_snr(&trace, 25.0);
    trace.add_noise(sigma, &mut ChaCha8Rng::seed_from_u64(9));

    let timing = BitTiming { f, n_r };
    let offset = sync_align(&trace, &timing, &fmt.prefix(), &SyncConfig::default())?;
    let rx = decode_bits(&trace.skip(offset), &timing, &fmt.prefix())?;
    let back = fmt.deframe(&rx[..fmt.packet_len()])?;
    println!("synced at sample {offset}, decoded payload {:06b}", payload_to_u8(&back));

    let setup = LinkBerSetup {
        f,
        n_r: 1,
        a0: 0.3,
        a1: 1.0,
        noise_sigma: 0.06,
        packets: 100,
        front_end: IrsFrontEnd::default(),
        format: fmt,
        sync: SyncConfig::default(),
    };
    let distances = [0.5, 1.0, 1.5, 2.0, 2.5];
    for (d, ber) in distances.iter().zip(ber_vs_distance(&setup, &distances, 1)?) {
        println!("{d:.1} m: BER {ber:.4}");
    }
    Ok(())
}
