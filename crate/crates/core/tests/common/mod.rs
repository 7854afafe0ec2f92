use std::path::PathBuf;

use nlos_irs::simkit::ScenarioConfig;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn scenario(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&scenario_dir().join(format!("{name}.toml"))).expect("bundled scenario loads")
}

#[allow(dead_code)]
pub fn all_scenarios() -> Vec<ScenarioConfig> {
    let pattern = scenario_dir().join("*.toml");
    nlos_irs::simkit::load_glob(pattern.to_str().expect("utf-8 path")).expect("scenarios load").into_iter().map(|(_, c)| c).collect()
}
