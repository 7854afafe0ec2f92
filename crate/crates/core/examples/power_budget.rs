//! IRS controller power draw and battery life for the default duty cycle and
//! a few alternatives.

use nlos_irs::irs::{power_budget, PowerProfile, DEFAULT_BATTERY_MWH};

fn main() -> nlos_irs::Result<()> {
    let base = PowerProfile::default();
    for comm in [0.05, 0.02, 0.10] {
        let p = PowerProfile { comm_duty: comm, sleep_duty: 0.55 - comm, ..base };
        let b = power_budget(&p, DEFAULT_BATTERY_MWH)?;
        println!("comm duty {:>4.0}%: {:.1} uW, {:.0} days", comm * 100.0, b.average_uw, b.lifetime_days);
    }
    Ok(())
}
