use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use mr_hetero::simulation::{run_benchmark, Method, SimConfig};
use mr_hetero::MrError;

use crate::manifest::Manifest;

/// Caps applied by `--quick`.
const QUICK_RUNS: usize = 10;
const QUICK_INDIVIDUALS: usize = 5_000;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Named setting.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// `key = value` settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replicates (overrides the setting).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Simulated cohort size (overrides the setting).
    #[arg(long)]
    pub individuals: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated subset of methods (default: all that apply).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, default_value = "sim_out")]
    pub out: PathBuf,
    /// Cap runs and cohort size for a fast smoke run.
    #[arg(long)]
    pub quick: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "MR_HETERO_THREADS")]
    pub threads: Option<usize>,
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), _) => SimConfig::preset(p)?,
        (None, Some(path)) => SimConfig::load(path)?,
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    };
    if let Some(r) = args.runs {
        cfg.n_runs = r;
    }
    if let Some(n) = args.individuals {
        cfg.n_individuals = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.quick {
        cfg.n_runs = cfg.n_runs.min(QUICK_RUNS);
        cfg.n_individuals = cfg.n_individuals.min(QUICK_INDIVIDUALS);
    }
    cfg.validate()?;
    let methods = match &args.methods {
        Some(list) => list
            .iter()
            .map(|m| m.trim().parse::<Method>())
            .collect::<Result<Vec<_>, MrError>>()?,
        None => Method::defaults_for(cfg.n_exposures),
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            return Err(MrError::InvalidConfig("--threads must be at least 1".into()).into());
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().context("cannot start worker threads")?;
    let metrics = pool.install(|| run_benchmark(&cfg, &methods))?;

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;
    let csv_path = args.out.join(format!("{}.csv", cfg.name));
    fs::write(&csv_path, metrics.to_csv())
        .with_context(|| format!("cannot write {}", csv_path.display()))?;

    let mut manifest = Manifest::new("simulate", cfg.seed);
    for line in cfg.to_key_values().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            manifest.set(k, v);
        }
    }
    let labels: Vec<&str> = methods.iter().map(|m| m.label()).collect();
    manifest.set("methods", labels.join(","));
    manifest.set("quick", args.quick);
    if let Some(path) = &args.config {
        manifest.inputs.push(path.clone());
    }
    manifest.outputs.push(csv_path);
    manifest.write(&args.out)?;
    Ok(())
}
