//! Runs a scenario file and prints its summary.
//!
//! `cargo run --example run_scenario -- scenarios/localization.toml [out_dir]`

use std::path::PathBuf;

use nlos_irs::simkit::{emit_reports, run_scenario, ScenarioConfig};

fn main() -> nlos_irs::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "scenarios/localization.toml".into()));
    let cfg = ScenarioConfig::load(&path)?;
    let report = run_scenario(&cfg)?;
    for e in report.epochs.iter().take(3) {
        println!("epoch {} slots {} ({:.3} s scan)", e.epoch, e.slots, e.scan_seconds);
    }
    print!("{}", report.stats());
    if let Some(out) = args.next() {
        emit_reports(&report, PathBuf::from(out).as_path())?;
    }
    Ok(())
}
