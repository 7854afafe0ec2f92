use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlos_irs::simkit::acceptance::run_acceptance;
use nlos_irs::simkit::conformance::run_conformance;
use nlos_irs::simkit::table3::{calibrate, table3, BASELINE_SECONDS};
use nlos_irs::simkit::{emit_reports, load_glob, run_scenario, run_sweep, ScenarioConfig};

#[derive(Parser)]
#[command(name = "nlos-sim", version, about = "Radar + IRS non-line-of-sight localization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics.csv, cdf.csv, epochs.jsonl and summary.txt.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Also run the acceptance suite; exit nonzero if any criterion fails.
        #[arg(long)]
        check: bool,
    },
    /// Run every scenario matching a glob in parallel and merge the reports.
    Sweep {
        pattern: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the scripted state-machine transcripts.
    Conformance,
    /// Fit the slot length to the naive baseline scanning time.
    CalibrateSlots {
        /// Sensing slots per angle in the naive superframe.
        #[arg(long, default_value_t = 10)]
        naive_slots: u32,
        /// Also rerun the naive, multi-target and single-target scenes.
        #[arg(long)]
        table3: bool,
    },
}

fn run(cli: Cli) -> nlos_irs::Result<bool> {
    match cli.command {
        Command::Run { config, out, seed, check } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run_scenario(&cfg)?;
            emit_reports(&report, &out)?;
            print!("{}", report.stats());
            println!("reports written to {}", out.display());
            if !check {
                return Ok(true);
            }
            let results = run_acceptance();
            for r in &results {
                println!("{r}");
            }
            Ok(results.iter().all(|r| r.passed))
        }
        Command::Sweep { pattern, out } => {
            let cfgs: Vec<ScenarioConfig> = load_glob(&pattern)?.into_iter().map(|(_, c)| c).collect();
            let report = run_sweep(&cfgs)?;
            print!("{}", report.stats());
            if let Some(out) = out {
                emit_reports(&report, &out)?;
                println!("reports written to {}", out.display());
            }
            Ok(true)
        }
        Command::Conformance => {
            let results = run_conformance();
            for r in &results {
                match &r.mismatch {
                    None => println!("PASS {} ({} steps)", r.name, r.steps),
                    Some(m) => println!("FAIL {}: {m}", r.name),
                }
            }
            Ok(results.iter().all(|r| r.passed()))
        }
        Command::CalibrateSlots { naive_slots, table3: with_table } => {
            let (slots, slot_seconds) = calibrate(naive_slots)?;
            println!("naive superframe: {slots} slots; slot_seconds = {slot_seconds} (baseline {BASELINE_SECONDS} s)");
            if !with_table {
                return Ok(true);
            }
            let t = table3()?;
            for r in &t.rows {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {:.4} s (bound {:.4} s)", r.case, r.seconds, r.bound);
            }
            Ok(t.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
