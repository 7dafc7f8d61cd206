//! Cochran's Q and per-SNP local q statistics.
//!
//! `Q = Σ_i r_i² / ω_i` with residuals `r_i = β_Yi - Σ_j θ_j β_Xij` around the
//! IVW fit. First-order weights use `ω_i = σ_Yi²`. Second-order weights add
//! the propagated exposure uncertainty
//! `Σ_j θ_j² σ_Xij² + Σ_{j≠k} θ_j θ_k σ_Xijk`, and since they depend on θ the
//! fit is iterated to a fixed point.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::ivw::ivw_fit;
use crate::outlier::{bonferroni_flags, refit_without, OutlierReport};
use crate::stats::wls::residuals;
use crate::stats::{weighted_ls, ChiSquared};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

/// Which second-order weight formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondOrderVariant {
    /// Delta-method variance of the residual:
    /// `σ_Y² + Σ_j θ_j² σ_Xj² + Σ_{j≠k} θ_j θ_k σ_Xjk`.
    #[default]
    Delta,
    /// Alternative rendering `σ_Y² + Σ_j β_Xj σ_Xj² + Σ_{j≠k} σ_Xjk`, which
    /// does not involve θ. Weights that come out non-positive are rejected.
    BetaScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    FirstOrder,
    SecondOrder {
        tolerance: f64,
        max_iter: usize,
        variant: SecondOrderVariant,
    },
}

impl WeightScheme {
    pub fn second_order() -> Self {
        WeightScheme::SecondOrder {
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
            variant: SecondOrderVariant::Delta,
        }
    }

    fn validate(&self) -> Result<()> {
        if let WeightScheme::SecondOrder {
            tolerance,
            max_iter,
            ..
        } = self
        {
            if !(*tolerance > 0.0) {
                return Err(MrError::InvalidConfig(format!(
                    "second-order tolerance must be positive, got {tolerance}"
                )));
            }
            if *max_iter == 0 {
                return Err(MrError::InvalidConfig(
                    "second-order max_iter must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeterogeneityResult {
    pub global_q: f64,
    pub df: usize,
    pub p_value: f64,
    pub snp_ids: Vec<String>,
    pub local_q: Vec<f64>,
    /// Variance-scale weights `ω_i` (q_i = r_i² / ω_i).
    pub weights: Vec<f64>,
    pub theta_used: Vec<f64>,
    pub iterations: usize,
    /// False when the second-order iteration hit `max_iter`; the last
    /// iterate is still reported.
    pub converged: bool,
}

/// Second-order weight of SNP `i` at `theta`.
fn second_order_weight(
    data: &SummaryDataset,
    i: usize,
    theta: &[f64],
    variant: SecondOrderVariant,
) -> f64 {
    let r = &data.records()[i];
    let d = data.d();
    let mut w = r.se_outcome * r.se_outcome;
    match variant {
        SecondOrderVariant::Delta => {
            for j in 0..d {
                for k in 0..d {
                    w += theta[j] * theta[k] * data.exposure_covariance(i, j, k);
                }
            }
        }
        SecondOrderVariant::BetaScaled => {
            for j in 0..d {
                w += r.beta_exposure[j] * r.se_exposure[j] * r.se_exposure[j];
                for k in 0..d {
                    if j != k {
                        w += data.exposure_covariance(i, j, k);
                    }
                }
            }
        }
    }
    w
}

fn second_order_weights(
    data: &SummaryDataset,
    theta: &[f64],
    variant: SecondOrderVariant,
) -> Result<Vec<f64>> {
    (0..data.n())
        .map(|i| {
            let w = second_order_weight(data, i, theta, variant);
            if w > 0.0 && w.is_finite() {
                Ok(w)
            } else {
                Err(MrError::InvalidValue {
                    row: i + 1,
                    column: "second_order_weight".into(),
                    reason: format!("non-positive weight {w} for `{}`", data.records()[i].snp_id),
                })
            }
        })
        .collect()
}

/// Sum in a fixed binary-tree order so results do not depend on how the
/// terms were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn cochran_q(data: &SummaryDataset, scheme: WeightScheme) -> Result<HeterogeneityResult> {
    scheme.validate()?;
    let x = data.exposure_matrix();
    let y = data.beta_outcome();
    let first = ivw_fit(data)?;

    let (theta, weights, iterations, converged) = match scheme {
        WeightScheme::FirstOrder => {
            let w = data.se_outcome().iter().map(|s| s * s).collect();
            (first.coefficients, w, 0, true)
        }
        WeightScheme::SecondOrder {
            tolerance,
            max_iter,
            variant,
        } => {
            let mut theta = first.coefficients;
            let mut converged = false;
            let mut iterations = 0;
            while iterations < max_iter {
                iterations += 1;
                let omega = second_order_weights(data, &theta, variant)?;
                let prec: Vec<f64> = omega.iter().map(|w| 1.0 / w).collect();
                let next = weighted_ls(&x, &y, &prec)?.coefficients;
                let change = next
                    .iter()
                    .zip(&theta)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                theta = next;
                if change < tolerance {
                    converged = true;
                    break;
                }
            }
            let omega = second_order_weights(data, &theta, variant)?;
            (theta, omega, iterations, converged)
        }
    };

    let resid = residuals(&x, &y, &theta);
    let local_q: Vec<f64> = resid.iter().zip(&weights).map(|(r, w)| r * r / w).collect();
    let global_q = pairwise_sum(&local_q);
    let df = data.n() - data.d();
    let p_value = ChiSquared::new(df as f64)?.sf(global_q);
    Ok(HeterogeneityResult {
        global_q,
        df,
        p_value,
        snp_ids: data.snp_ids().map(String::from).collect(),
        local_q,
        weights,
        theta_used: theta,
        iterations,
        converged,
    })
}

/// Per-SNP χ²₁ p-values of the local q statistics and Bonferroni flags.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTest {
    pub p_values: Vec<f64>,
    pub flagged: Vec<bool>,
    /// `alpha / n_tests`
    pub level: f64,
}

pub fn local_q_pvalues(result: &HeterogeneityResult, n_tests: usize, alpha: f64) -> LocalTest {
    let chi1 = ChiSquared::new(1.0).expect("df = 1");
    let level = alpha / n_tests as f64;
    let p_values: Vec<f64> = result.local_q.iter().map(|q| chi1.sf(*q)).collect();
    let flagged = p_values.iter().map(|p| *p < level).collect();
    LocalTest {
        p_values,
        flagged,
        level,
    }
}

/// Flag SNPs whose local q is significant at `alpha / n` and refit without
/// them. First-order weights give the standard q test, second-order weights
/// the measurement-error adjusted one.
pub fn q_outlier_test(
    data: &SummaryDataset,
    scheme: WeightScheme,
    alpha: f64,
    label: &str,
) -> Result<OutlierReport> {
    let het = cochran_q(data, scheme)?;
    let test = local_q_pvalues(&het, data.n(), alpha);
    let flagged = bonferroni_flags(&het.snp_ids, &test.p_values, alpha);
    let refit = refit_without(data, &flagged, label)?;
    Ok(OutlierReport {
        method_label: label.to_string(),
        snp_ids: het.snp_ids,
        statistic: het.local_q,
        per_snp_p: test.p_values,
        flagged,
        threshold_description: format!("chi2_1 p < {alpha}/{} = {:.6e}", data.n(), test.level),
        refit,
    })
}
