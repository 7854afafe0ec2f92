//! Scenario simulation: config, radar/IRS state machines, the slot-level
//! engine and report generation.

pub mod acceptance;
pub mod codebook;
pub mod config;
pub mod conformance;
pub mod engine;
pub mod fsm;
pub mod metrics;
pub mod motion;
pub mod sweep;
pub mod table3;

pub use codebook::Message;
pub use config::ScenarioConfig;
pub use engine::run_scenario;
pub use metrics::{emit_reports, MetricsReport};
pub use sweep::{load_glob, run_sweep};
