//! Genomic-control calibrated outlier detection (GC-Q).
//!
//! First-order local q statistics are overdispersed relative to χ²₁. The
//! inflation factor is estimated from their median,
//! `λ̂ = median(q) / 0.675²`, each q is divided by `λ̂`, and SNPs whose
//! rescaled statistic exceeds the χ²₁ critical value at the Bonferroni level
//! `α / n` are removed before refitting the IVW model.
//!
//! The median estimate is only meaningful while at least half of the
//! instruments are valid. With a majority of outliers `λ̂` is driven by the
//! outliers themselves and the method flags next to nothing; this is not
//! corrected.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::heterogeneity::{cochran_q, WeightScheme};
use crate::ivw::CausalEstimate;
use crate::outlier::{refit_without, OutlierReport};
use crate::stats::{median, ChiSquared};

/// `0.675²`, the rounded χ²₁ median used as the genomic-control divisor.
/// (The exact median is 0.454936...)
pub const CHI2_1_MEDIAN: f64 = 0.455_625;

/// `λ̂` at or below this is treated as degenerate (an exactly fitting dataset).
pub const DEGENERATE_LAMBDA: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcqOptions {
    pub alpha: f64,
    /// Clamp `λ̂` from below at 1 (never inflate the statistics).
    pub floor_lambda_at_one: bool,
    /// Re-estimate `λ̂` on the pruned set and repeat until nothing new is flagged.
    pub iterate: bool,
}

impl Default for GcqOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            floor_lambda_at_one: false,
            iterate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcqWarning {
    /// `λ̂` was (numerically) zero; nothing was flagged and the refit is the
    /// full model. Adjusted statistics are left unscaled.
    DegenerateLambda,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcqResult {
    pub lambda_hat: f64,
    pub snp_ids: Vec<String>,
    pub local_q: Vec<f64>,
    pub adjusted_q: Vec<f64>,
    /// χ²₁ upper-tail p-values of the adjusted statistics.
    pub adjusted_p: Vec<f64>,
    pub flagged: Vec<String>,
    pub alpha: f64,
    pub alpha_star: f64,
    pub critical_value: f64,
    pub refit: CausalEstimate,
    pub warning: Option<GcqWarning>,
    /// Number of detection passes (1 unless `iterate` is set).
    pub passes: usize,
}

impl GcqResult {
    pub fn to_report(&self) -> OutlierReport {
        OutlierReport {
            method_label: "gcq".into(),
            snp_ids: self.snp_ids.clone(),
            statistic: self.adjusted_q.clone(),
            per_snp_p: self.adjusted_p.clone(),
            flagged: self.flagged.clone(),
            threshold_description: format!(
                "q/lambda > {:.6} (chi2_1 at alpha* = {:.6e}), lambda = {:.6}",
                self.critical_value, self.alpha_star, self.lambda_hat
            ),
            refit: self.refit.clone(),
        }
    }
}

/// `median(q) / 0.675²`.
pub fn estimate_lambda(local_q: &[f64]) -> Result<f64> {
    if local_q.is_empty() {
        return Err(MrError::EmptyInput("no local q statistics"));
    }
    if let Some(i) = local_q.iter().position(|q| !(q.is_finite() && *q >= 0.0)) {
        return Err(MrError::InvalidValue {
            row: i + 1,
            column: "q".into(),
            reason: format!("local q must be finite and non-negative, got {}", local_q[i]),
        });
    }
    Ok(median(local_q)? / CHI2_1_MEDIAN)
}

struct Pass {
    lambda: f64,
    local_q: Vec<f64>,
    adjusted_q: Vec<f64>,
    flagged_idx: Vec<usize>,
    degenerate: bool,
}

fn single_pass(data: &SummaryDataset, opts: &GcqOptions, critical: f64) -> Result<Pass> {
    let het = cochran_q(data, WeightScheme::FirstOrder)?;
    let mut lambda = estimate_lambda(&het.local_q)?;
    if opts.floor_lambda_at_one {
        lambda = lambda.max(1.0);
    }
    if lambda <= DEGENERATE_LAMBDA {
        return Ok(Pass {
            lambda,
            adjusted_q: het.local_q.clone(),
            local_q: het.local_q,
            flagged_idx: Vec::new(),
            degenerate: true,
        });
    }
    let adjusted_q: Vec<f64> = het.local_q.iter().map(|q| q / lambda).collect();
    let flagged_idx = adjusted_q
        .iter()
        .enumerate()
        .filter(|(_, q)| **q > critical)
        .map(|(i, _)| i)
        .collect();
    Ok(Pass {
        lambda,
        local_q: het.local_q,
        adjusted_q,
        flagged_idx,
        degenerate: false,
    })
}

pub fn detect_outliers_gcq(data: &SummaryDataset, opts: GcqOptions) -> Result<GcqResult> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(MrError::InvalidP(opts.alpha));
    }
    let n = data.n();
    let alpha_star = opts.alpha / n as f64;
    let chi1 = ChiSquared::new(1.0)?;
    let critical = chi1.quantile(1.0 - alpha_star)?;

    let first = single_pass(data, &opts, critical)?;
    let ids: Vec<String> = data.snp_ids().map(String::from).collect();
    let mut flagged: Vec<String> = first.flagged_idx.iter().map(|&i| ids[i].clone()).collect();
    let mut passes = 1;

    if opts.iterate && !first.degenerate {
        let mut current = data.clone();
        let mut new = flagged.clone();
        while !new.is_empty() {
            current = match current.drop_snps(&new) {
                Ok(c) => c,
                Err(MrError::TooFewSnps { .. }) => break,
                Err(e) => return Err(e),
            };
            let pass = single_pass(&current, &opts, critical)?;
            passes += 1;
            if pass.degenerate {
                break;
            }
            let cur_ids: Vec<&str> = current.snp_ids().collect();
            new = pass
                .flagged_idx
                .iter()
                .map(|&i| cur_ids[i].to_string())
                .collect();
            flagged.extend(new.iter().cloned());
        }
        // report flags in dataset order
        flagged.sort_by_key(|s| ids.iter().position(|x| x == s));
    }

    let refit = refit_without(data, &flagged, "gcq")?;
    Ok(GcqResult {
        lambda_hat: first.lambda,
        adjusted_p: first.adjusted_q.iter().map(|q| chi1.sf(*q)).collect(),
        snp_ids: ids,
        local_q: first.local_q,
        adjusted_q: first.adjusted_q,
        flagged,
        alpha: opts.alpha,
        alpha_star,
        critical_value: critical,
        refit,
        warning: first.degenerate.then_some(GcqWarning::DegenerateLambda),
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SnpRecord;

    #[test]
    fn lambda_is_one_at_the_reference_median() {
        assert_eq!(estimate_lambda(&[CHI2_1_MEDIAN; 7]).unwrap(), 1.0);
    }

    #[test]
    fn lambda_by_hand() {
        let lam = estimate_lambda(&[0.1, 4.55625, 100.0]).unwrap();
        assert!((lam - 10.0).abs() < 1e-12);
        assert_eq!(estimate_lambda(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn lambda_errors() {
        assert!(matches!(estimate_lambda(&[]), Err(MrError::EmptyInput(_))));
        assert!(estimate_lambda(&[1.0, -1.0]).is_err());
        assert!(estimate_lambda(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn exact_fit_is_degenerate() {
        let recs = (1..6)
            .map(|i| SnpRecord::single(format!("s{i}"), i as f64, 0.1, 0.5 * i as f64, 0.1))
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        let res = detect_outliers_gcq(&data, GcqOptions::default()).unwrap();
        assert_eq!(res.warning, Some(GcqWarning::DegenerateLambda));
        assert!(res.flagged.is_empty());
        assert!((res.refit.theta[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn floor_option() {
        let recs = (1..12)
            .map(|i| {
                let e = if i % 2 == 0 { 1e-3 } else { -1e-3 };
                SnpRecord::single(format!("s{i}"), i as f64, 0.1, 0.5 * i as f64 + e, 0.1)
            })
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        let raw = detect_outliers_gcq(&data, GcqOptions::default()).unwrap();
        assert!(raw.lambda_hat < 1.0);
        let floored = detect_outliers_gcq(
            &data,
            GcqOptions {
                floor_lambda_at_one: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(floored.lambda_hat, 1.0);
    }
}
