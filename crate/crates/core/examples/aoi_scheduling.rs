//! Adaptive angle-of-interest scheduling: slot budgets from detections, the
//! speed constraint, and the scanning time against the naive sweep.

use nlos_irs::irs::ReflectionAngle::*;
use nlos_irs::scheduler::*;

fn main() -> nlos_irs::Result<()> {
    let slot = calibrate_slot_seconds(44, 7.15)?;
    let naive = naive_superframe(&[Deg30, Deg45, Deg60, Deg75], 10)?;
    println!("slot {slot:.4} s, naive sweep {:.3} s", scanning_time(&naive, slot)?);

    let p = AoiParams { slot_seconds: slot, ..AoiParams::default() };
    let prev = AngleDurationSet::uniform(10)?;
    let cases = [
        ("one target", vec![TargetDetection { angle: Deg45, range: 3.0, energy: 1.0, velocity: 0.0 }]),
        (
            "two targets",
            vec![
                TargetDetection { angle: Deg30, range: 2.0, energy: 1.0, velocity: 0.05 },
                TargetDetection { angle: Deg60, range: 2.83, energy: 0.25, velocity: 0.0 },
            ],
        ),
        ("fast walker", vec![TargetDetection { angle: Deg60, range: 2.0, energy: 1.0, velocity: 1.5 }]),
    ];
    for (name, dets) in cases {
        match build_aoi(&dets, &prev, &p) {
            Ok(set) => println!("{name}: {:?}, scan {:.3} s", set.entries(), scanning_time(&adaptive_superframe(&set), slot)?),
            Err(e) => println!("{name}: {e}"),
        }
    }
    Ok(())
}
