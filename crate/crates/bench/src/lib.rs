//! Fixtures for the detector benchmarks under `benches/`.

use mr_hetero::simulation::{generate_replicate, SimConfig};
use mr_hetero::SummaryDataset;

/// First replicate of a preset at a reduced cohort size.
pub fn fixture(preset: &str, individuals: usize) -> SummaryDataset {
    let mut cfg = SimConfig::preset(preset).expect("known preset");
    cfg.n_individuals = individuals;
    generate_replicate(&cfg, 0).expect("replicate").data
}

/// Benchmark grid: (preset, cohort size).
pub const SETTINGS: [(&str, usize); 2] = [("uni10", 5_000), ("multi10", 5_000)];
