//! Scenario files, the ensemble runner and result export.
//!
//! Every output file starts with the SHA-256 of the resolved scenario, so a
//! CSV found on disk can be matched to the configuration that produced it.

mod export;
mod runner;
mod scenario;
mod summary;

pub use export::{attractor_csv, noise_csv, trajectory_csv, write_json, write_text};
pub use runner::{
    run_scenario, scenario_hash, CheckResult, Prepared, RunManifest, SeedMetrics, SeedOutputs, SeedResult, SeedRun,
    SOFTWARE_VERSION,
};
pub use scenario::{
    apply_override, builtin_names, AnalysisBlock, CheckKind, EnsembleBlock, GridBlock, HorizonBlock, InitialBlock,
    NoiseBlock, RunBlock, Scenario, Shape, Tolerances,
};
pub use summary::{ensemble_summary, EnsembleSummary, PassRate, Spread};

/// Reads and validates a scenario file; see [`Scenario::load`].
pub fn load_scenario(path: impl AsRef<std::path::Path>) -> crate::Result<Scenario> {
    Scenario::load(path, &[])
}
