//! Common output of the outlier detectors.

use crate::data::SummaryDataset;
use crate::error::Result;
use crate::ivw::{ivw_multivariable, CausalEstimate};

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub method_label: String,
    /// SNP ids in dataset order.
    pub snp_ids: Vec<String>,
    /// Per-SNP test statistic (local q or observed RSS contribution).
    pub statistic: Vec<f64>,
    pub per_snp_p: Vec<f64>,
    pub flagged: Vec<String>,
    pub threshold_description: String,
    /// IVW fit after dropping the flagged SNPs.
    pub refit: CausalEstimate,
}

impl OutlierReport {
    pub fn is_flagged(&self, snp: &str) -> bool {
        self.flagged.iter().any(|s| s == snp)
    }

    pub fn flagged_mask(&self) -> Vec<bool> {
        self.snp_ids.iter().map(|s| self.is_flagged(s)).collect()
    }
}

/// Multivariable IVW after removing `flagged`; the full fit when none are.
pub fn refit_without(data: &SummaryDataset, flagged: &[String], label: &str) -> Result<CausalEstimate> {
    let pruned = data.drop_snps(flagged)?;
    Ok(ivw_multivariable(&pruned)?.relabel(label))
}

/// Ids whose p-value falls below the Bonferroni level `alpha / n`.
pub(crate) fn bonferroni_flags(ids: &[String], p: &[f64], alpha: f64) -> Vec<String> {
    let level = alpha / ids.len() as f64;
    ids.iter()
        .zip(p)
        .filter(|(_, p)| **p < level)
        .map(|(id, _)| id.clone())
        .collect()
}
