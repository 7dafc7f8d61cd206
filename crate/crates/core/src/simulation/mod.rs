//! Simulation study: data generation from individual-level cohorts and the
//! detector benchmark.

pub mod benchmark;
pub mod config;
pub mod dgp;

pub use benchmark::{run_benchmark, Method, MethodMetrics, SimMetrics};
pub use config::{EffectDist, PleiotropyMode, SimConfig, PRESET_NAMES};
pub use dgp::{generate_replicate, Replicate};
