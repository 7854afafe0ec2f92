//! Synthesises a burst of chirps from two moving reflectors and recovers
//! their range and radial speed from the range-Doppler map.

use nlos_irs::signal::{range_doppler, range_fft, synthesize_beat_frame, ChirpConfig, PathEcho};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nlos_irs::Result<()> {
    let cfg = ChirpConfig { chirps_per_slot: 64, ..ChirpConfig::default() };
    println!(
        "range bin {:.2} m, max range {:.1} m, {} samples per chirp",
        cfg.range_resolution(),
        cfg.max_unambiguous_range(),
        cfg.samples_per_chirp()
    );
    let echoes = [PathEcho::at_range(2.4, 1.0).with_velocity(0.8), PathEcho::at_range(4.2, 0.5).with_velocity(-0.4)];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let frames = (0..cfg.chirps_per_slot)
        .map(|c| synthesize_beat_frame(&cfg, &echoes, 1e-3, c, &mut rng))
        .collect::<nlos_irs::Result<Vec<_>>>()?;

    println!("single-chirp FFT peak: {:.2} m", range_fft(&frames[0], &cfg)?.peak_range());
    let map = range_doppler(&frames, &cfg)?;
    println!("velocity bin {:.3} m/s", map.velocity_bin_mps);
    for p in map.peaks(10.0).iter().take(4) {
        println!("peak at {:.2} m, {:+.3} m/s, {:.1} dB", p.range, p.velocity, 10.0 * p.power.log10());
    }
    Ok(())
}
