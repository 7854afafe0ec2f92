//! Parallel scenario sweeps. Each scenario runs on its own thread with its
//! own state; reports are merged in scenario-name order so the result does
//! not depend on scheduling.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::ScenarioConfig;
use super::engine::run_scenario;
use super::metrics::MetricsReport;

/// Loads every scenario matching `pattern`, sorted by path.
pub fn load_glob(pattern: &str) -> Result<Vec<(PathBuf, ScenarioConfig)>> {
    let paths = glob::glob(pattern).map_err(|e| Error::Config { path: "glob".into(), message: e.to_string() })?;
    let mut out = Vec::new();
    for p in paths {
        let p = p.map_err(|e| Error::Io(e.to_string()))?;
        let cfg = ScenarioConfig::load(&p)?;
        out.push((p, cfg));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    if out.is_empty() {
        return Err(Error::Config { path: "glob".into(), message: format!("no scenario matches {pattern}") });
    }
    Ok(out)
}

/// Runs all scenarios in parallel and merges their reports ordered by name.
/// Scenario names must be unique.
pub fn run_sweep(cfgs: &[ScenarioConfig]) -> Result<MetricsReport> {
    let mut order: Vec<&ScenarioConfig> = cfgs.iter().collect();
    order.sort_by(|a, b| a.name.cmp(&b.name));
    if let Some(w) = order.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::Config { path: "name".into(), message: format!("duplicate scenario name {}", w[0].name) });
    }
    let reports: Vec<Result<MetricsReport>> = order.par_iter().map(|c| run_scenario(c)).collect();
    reports.into_iter().try_fold(MetricsReport::default(), |acc, r| Ok(acc.merge(r?)))
}
