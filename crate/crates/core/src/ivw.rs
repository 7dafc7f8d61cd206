//! Inverse-variance weighted causal effect estimation.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::stats::{normal_two_sided_p, weighted_ls, WlsFit};

/// Causal effect estimates for each exposure.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalEstimate {
    pub theta: Vec<f64>,
    pub se: Vec<f64>,
    /// Two-sided, from `z = θ̂ / SE` under the normal approximation.
    pub p_values: Vec<f64>,
    pub n_snps_used: usize,
    pub method_label: String,
}

impl CausalEstimate {
    pub fn from_parts(theta: Vec<f64>, se: Vec<f64>, n_snps_used: usize, label: &str) -> Self {
        let p_values = theta
            .iter()
            .zip(&se)
            .map(|(t, s)| normal_two_sided_p(t / s))
            .collect();
        Self {
            theta,
            se,
            p_values,
            n_snps_used,
            method_label: label.to_string(),
        }
    }

    fn from_fit(fit: &WlsFit, n: usize, label: &str) -> Self {
        Self::from_parts(fit.coefficients.clone(), fit.standard_errors(), n, label)
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.method_label = label.to_string();
        self
    }
}

/// Per-SNP Wald ratio and its first-order precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub theta: f64,
    /// `β_X² / σ_Y²`
    pub weight: f64,
}

pub(crate) fn require_univariable(data: &SummaryDataset) -> Result<()> {
    if data.d() != 1 {
        return Err(MrError::DimensionMismatch(format!(
            "method needs a single exposure, dataset has {}",
            data.d()
        )));
    }
    Ok(())
}

pub fn ratio_estimates(data: &SummaryDataset) -> Result<Vec<RatioEstimate>> {
    require_univariable(data)?;
    data.records()
        .iter()
        .map(|r| {
            let bx = r.beta_exposure[0];
            if bx == 0.0 {
                return Err(MrError::ZeroExposureBeta(r.snp_id.clone()));
            }
            Ok(RatioEstimate {
                theta: r.beta_outcome / bx,
                weight: bx * bx / (r.se_outcome * r.se_outcome),
            })
        })
        .collect()
}

/// Weighted mean of the ratio estimates with first-order weights.
pub fn ivw_univariable(data: &SummaryDataset) -> Result<CausalEstimate> {
    let ratios = ratio_estimates(data)?;
    let total: f64 = ratios.iter().map(|r| r.weight).sum();
    let theta = ratios.iter().map(|r| r.weight * r.theta).sum::<f64>() / total;
    Ok(CausalEstimate::from_parts(
        vec![theta],
        vec![total.sqrt().recip()],
        data.n(),
        "ivw",
    ))
}

/// Zero-intercept WLS of `β_Y` on the exposure matrix with weights `σ_Y^{-2}`.
pub fn ivw_fit(data: &SummaryDataset) -> Result<WlsFit> {
    weighted_ls(
        &data.exposure_matrix(),
        &data.beta_outcome(),
        &data.outcome_precision(),
    )
}

pub fn ivw_multivariable(data: &SummaryDataset) -> Result<CausalEstimate> {
    let fit = ivw_fit(data)?;
    Ok(CausalEstimate::from_fit(&fit, data.n(), "ivw"))
}
