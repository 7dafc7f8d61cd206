//! Radial MR (IVW form, no intercept).
//!
//! Each SNP becomes a point `(√w_i, θ̂_i √w_i)`; the slope of the regression
//! through the origin is the causal estimate and `q_i = w_i (θ̂_i - θ̂)²` is
//! its contribution to Cochran's Q. Under second-order weights
//! `w_i = β_Xi² / (σ_Yi² + θ̂² σ_Xi²)` and the slope is iterated to a fixed point.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::heterogeneity::{SecondOrderVariant, WeightScheme};
use crate::ivw::{ratio_estimates, require_univariable};
use crate::outlier::{bonferroni_flags, refit_without, OutlierReport};
use crate::stats::{weighted_ls, ChiSquared, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoint {
    pub snp: String,
    /// `θ̂_i √w_i`
    pub z_stat: f64,
    /// `√w_i`
    pub precision: f64,
    pub q: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialResult {
    pub theta_radial: f64,
    pub weights: Vec<f64>,
    pub points: Vec<RadialPoint>,
    pub iterations: usize,
    pub converged: bool,
    pub report: OutlierReport,
}

/// Slope of `√w θ̂_i` on `√w` through the origin.
fn radial_slope(ratios: &[f64], w: &[f64]) -> Result<f64> {
    let n = ratios.len();
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let x = Matrix::from_row_major(n, 1, sw.clone())?;
    let y: Vec<f64> = ratios.iter().zip(&sw).map(|(t, s)| t * s).collect();
    Ok(weighted_ls(&x, &y, &vec![1.0; n])?.coefficients[0])
}

fn modified_weights(
    data: &SummaryDataset,
    theta: f64,
    variant: SecondOrderVariant,
) -> Result<Vec<f64>> {
    data.records()
        .iter()
        .map(|r| {
            let bx = r.beta_exposure[0];
            let sx2 = r.se_exposure[0].powi(2);
            let var = match variant {
                SecondOrderVariant::Delta => r.se_outcome.powi(2) + theta * theta * sx2,
                SecondOrderVariant::BetaScaled => r.se_outcome.powi(2) + bx * sx2,
            };
            if !(var > 0.0) {
                return Err(MrError::InvalidValue {
                    row: 0,
                    column: r.snp_id.clone(),
                    reason: format!("non-positive radial variance {var}"),
                });
            }
            Ok(bx * bx / var)
        })
        .collect()
}

pub fn radial_mr(data: &SummaryDataset, scheme: WeightScheme, alpha: f64) -> Result<RadialResult> {
    require_univariable(data)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(MrError::InvalidP(alpha));
    }
    let ratio_est = ratio_estimates(data)?;
    let ratios: Vec<f64> = ratio_est.iter().map(|r| r.theta).collect();
    let first_w: Vec<f64> = ratio_est.iter().map(|r| r.weight).collect();
    let mut theta = radial_slope(&ratios, &first_w)?;

    let (weights, iterations, converged) = match scheme {
        WeightScheme::FirstOrder => (first_w, 0, true),
        WeightScheme::SecondOrder {
            tolerance,
            max_iter,
            variant,
        } => {
            let mut iterations = 0;
            let mut converged = false;
            while iterations < max_iter {
                iterations += 1;
                let w = modified_weights(data, theta, variant)?;
                let next = radial_slope(&ratios, &w)?;
                let change = (next - theta).abs();
                theta = next;
                if change < tolerance {
                    converged = true;
                    break;
                }
            }
            (modified_weights(data, theta, variant)?, iterations, converged)
        }
    };

    let chi1 = ChiSquared::new(1.0)?;
    let q: Vec<f64> = ratios
        .iter()
        .zip(&weights)
        .map(|(t, w)| w * (t - theta).powi(2))
        .collect();
    let p: Vec<f64> = q.iter().map(|v| chi1.sf(*v)).collect();
    let ids: Vec<String> = data.snp_ids().map(String::from).collect();
    let flagged = bonferroni_flags(&ids, &p, alpha);
    let points = ids
        .iter()
        .enumerate()
        .map(|(i, id)| RadialPoint {
            snp: id.clone(),
            z_stat: ratios[i] * weights[i].sqrt(),
            precision: weights[i].sqrt(),
            q: q[i],
            flagged: flagged.contains(id),
        })
        .collect();
    let refit = refit_without(data, &flagged, "radial")?;
    Ok(RadialResult {
        theta_radial: theta,
        weights,
        points,
        iterations,
        converged,
        report: OutlierReport {
            method_label: "radial".into(),
            snp_ids: ids,
            statistic: q,
            per_snp_p: p,
            flagged,
            threshold_description: format!("chi2_1 p < {alpha}/{}", data.n()),
            refit,
        },
    })
}

/// Plot-ready CSV: `snp,z_stat,precision,q_i,flagged`.
pub fn radial_points_csv(points: &[RadialPoint]) -> String {
    let mut out = String::from("snp,z_stat,precision,q_i,flagged\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.snp, p.z_stat, p.precision, p.q, p.flagged
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SnpRecord;

    #[test]
    fn homogeneous_ratios() {
        let recs = (1..7)
            .map(|i| SnpRecord::single(format!("s{i}"), i as f64, 0.1, -0.4 * i as f64, 0.2))
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        for scheme in [WeightScheme::FirstOrder, WeightScheme::second_order()] {
            let res = radial_mr(&data, scheme, 0.05).unwrap();
            assert!((res.theta_radial + 0.4).abs() < 1e-14);
            assert!(res.report.flagged.is_empty());
        }
    }

    #[test]
    fn csv_header() {
        let csv = radial_points_csv(&[RadialPoint {
            snp: "rs1".into(),
            z_stat: 1.5,
            precision: 2.0,
            q: 0.25,
            flagged: false,
        }]);
        assert_eq!(csv, "snp,z_stat,precision,q_i,flagged\nrs1,1.5,2,0.25,false\n");
    }
}
