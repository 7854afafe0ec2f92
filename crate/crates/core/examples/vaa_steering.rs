//! Van Atta board: the switch table for each reflection angle, the steering
//! implied by a delay gradient, and the reflection pattern in each mode.

use nlos_irs::irs::{reflect_gain, steering_angle_from_pairing, IrsMode, IrsState, ReflectionAngle, VaaPairing, VAA_ELEMENTS};

fn main() -> nlos_irs::Result<()> {
    for a in ReflectionAngle::ALL {
        let sw = a.switch_config();
        let lines: Vec<String> = sw.lines.iter().map(ToString::to_string).collect();
        let throws: Vec<String> = sw.switches.iter().map(ToString::to_string).collect();
        println!("{a}: lines [{}], switches [{}]", lines.join(" "), throws.join(" "));
    }

    let incident = 20f64.to_radians();
    for delta in [0.0, 0.5, 1.0] {
        let out = steering_angle_from_pairing(&VaaPairing::mirror(VAA_ELEMENTS, delta), incident)?;
        println!("delay step {delta:.1} rad: incident 20.0 deg leaves at {:.1} deg", out.to_degrees());
    }

    let incident = -10f64.to_radians();
    println!("\ngain for a wave arriving at -10 deg, by outgoing angle:");
    let modes = [IrsMode::Retro, IrsMode::Reflect(ReflectionAngle::Deg30), IrsMode::Reflect(ReflectionAngle::Deg60)];
    for out_deg in (-80..=80).step_by(10) {
        let gains: Vec<String> = modes
            .iter()
            .map(|&mode| format!("{:.2}", reflect_gain(&IrsState { id: 1, mode }, incident, (out_deg as f64).to_radians())))
            .collect();
        println!("{out_deg:+4} deg  retro {}  30 deg {}  60 deg {}", gains[0], gains[1], gains[2]);
    }
    Ok(())
}
