//! Locates a hidden target through the IRS: 2D-MUSIC on a 4-element array,
//! IRS-on/off differencing to pick the relay echo, then the relay geometry.

use nlos_irs::geometry::{path_between, wrap_angle, Point2, RadarSite};
use nlos_irs::locator::*;
use nlos_irs::signal::{synthesize_array_frames, ChirpConfig, PathEcho};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn capture(cfg: &ChirpConfig, echoes: &[PathEcho], rng: &mut ChaCha8Rng) -> nlos_irs::Result<RxCube> {
    let chirps = (0..cfg.chirps_per_slot)
        .map(|c| synthesize_array_frames(cfg, echoes, 1e-3, c, 4, rng))
        .collect::<nlos_irs::Result<Vec<_>>>()?;
    RxCube::from_chirps(&chirps)
}

fn main() -> nlos_irs::Result<()> {
    let cfg = ChirpConfig::default();
    let radar = RadarSite::new(1, Point2::new(0.0, 0.0), 0.0, cfg.wavelength());
    let irs = Point2::new(1.0, 0.0);
    let target = Point2::new(-0.41421356, 1.41421356);
    let truth = path_between(radar.position, irs, target)?;
    println!("truth: d_rs {:.3} m, d_st {:.3} m, alpha {:.1} deg", truth.d_rs, truth.d_st, truth.alpha_required.to_degrees());

    // A wall at 2.5 m is always there; the relay echo only while the IRS reflects.
    let aoa_irs = wrap_angle(radar.position.bearing_to(&irs) - radar.boresight);
    let wall = PathEcho::at_range(2.5, 0.3).with_aoa(-0.4);
    let relay = PathEcho::new(2.0 * (truth.d_rs + truth.d_st), 0.2).with_aoa(aoa_irs);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let on = capture(&cfg, &[wall, relay], &mut rng)?;
    let off = capture(&cfg, &[wall], &mut rng)?;

    let grid = MusicGrid::default();
    let sm = Smoothing::default();
    let on_peaks = music_2d(&on, &cfg, &grid, 2, sm)?;
    let off_peaks = music_2d(&off, &cfg, &grid, 2, sm)?;
    for (p, label) in classify_nlos(&on_peaks, &off_peaks, &ClassifyConfig::default()) {
        println!("peak {:.2} m at {:+.1} deg: {label:?}", p.range, p.aoa.to_degrees());
        if label == PeakLabel::NlosViaIrs {
            let est = localize_target(p.range, truth.d_rs, truth.alpha_required, truth.phi, irs)?;
            println!("target estimate ({:.3}, {:.3}), error {:.1} cm", est.x, est.y, 100.0 * est.distance(&target));
        }
    }
    Ok(())
}
