//! Simple and weighted median estimators of the causal effect.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::ivw::{ratio_estimates, CausalEstimate};
use crate::stats::{median, weighted_median, McRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianConfig {
    pub weighted: bool,
    pub n_bootstrap: usize,
    pub seed: u64,
}

impl Default for MedianConfig {
    fn default() -> Self {
        Self {
            weighted: true,
            n_bootstrap: 1000,
            seed: 1,
        }
    }
}

fn median_of(ratios: &[f64], weights: &[f64], weighted: bool) -> Result<f64> {
    if weighted {
        weighted_median(ratios, weights)
    } else {
        median(ratios)
    }
}

/// Point estimate only; the weights are first-order `β_X² / σ_Y²`.
pub fn median_point(data: &SummaryDataset, weighted: bool) -> Result<f64> {
    if data.n() < 3 {
        return Err(MrError::TooFewSnps {
            n: data.n(),
            d: data.d(),
            required: 2,
        });
    }
    let r = ratio_estimates(data)?;
    let ratios: Vec<f64> = r.iter().map(|e| e.theta).collect();
    let weights: Vec<f64> = r.iter().map(|e| e.weight).collect();
    median_of(&ratios, &weights, weighted)
}

/// Median estimate with a parametric bootstrap standard error: both betas
/// are redrawn from normals with their reported SEs, the weights are kept
/// at their observed values.
pub fn median_estimator(data: &SummaryDataset, cfg: &MedianConfig) -> Result<CausalEstimate> {
    let theta = median_point(data, cfg.weighted)?;
    if cfg.n_bootstrap < 2 {
        return Err(MrError::InvalidConfig("need at least two bootstrap draws".into()));
    }
    let r = ratio_estimates(data)?;
    let weights: Vec<f64> = r.iter().map(|e| e.weight).collect();
    let mut rng = McRng::new(cfg.seed);
    let mut boot = Vec::with_capacity(cfg.n_bootstrap);
    let mut ratios = vec![0.0; data.n()];
    for _ in 0..cfg.n_bootstrap {
        for (slot, rec) in ratios.iter_mut().zip(data.records()) {
            let bx = rng.normal_with(rec.beta_exposure[0], rec.se_exposure[0]);
            let by = rng.normal_with(rec.beta_outcome, rec.se_outcome);
            *slot = by / bx;
        }
        boot.push(median_of(&ratios, &weights, cfg.weighted)?);
    }
    let mean = boot.iter().sum::<f64>() / boot.len() as f64;
    let var = boot.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boot.len() - 1) as f64;
    let label = if cfg.weighted { "weighted_median" } else { "simple_median" };
    Ok(CausalEstimate::from_parts(
        vec![theta],
        vec![var.sqrt()],
        data.n(),
        label,
    ))
}
