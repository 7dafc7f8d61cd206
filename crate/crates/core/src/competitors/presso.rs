//! MR-PRESSO global and outlier tests.
//!
//! The observed residual sum of squares uses leave-one-out IVW estimates
//! `θ̂^{-i}`. The null distribution comes from simulated summary data: for
//! each replicate the exposure betas are redrawn around their estimates and
//! each outcome beta around its leave-one-out prediction. Every SNP owns a
//! random substream keyed by its id, so results do not depend on row order.

use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::outlier::{bonferroni_flags, refit_without, OutlierReport};
use crate::stats::linalg::{Cholesky, Matrix};
use crate::stats::wls::{dot, normal_equations};
use crate::stats::McRng;

pub const MIN_SIMULATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressoConfig {
    pub n_simulations: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Redraw exposure betas in the null simulation as well as outcome betas.
    pub perturb_exposures: bool,
}

impl Default for PressoConfig {
    fn default() -> Self {
        Self {
            n_simulations: 1000,
            seed: 1,
            alpha: 0.05,
            perturb_exposures: true,
        }
    }
}

impl PressoConfig {
    fn validate(&self) -> Result<()> {
        if self.n_simulations < MIN_SIMULATIONS {
            return Err(MrError::InvalidConfig(format!(
                "MR-PRESSO needs at least {MIN_SIMULATIONS} simulations, got {}",
                self.n_simulations
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(MrError::InvalidP(self.alpha));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressoGlobal {
    pub rss_observed: f64,
    pub p_value: f64,
    pub n_simulations: usize,
}

/// `(1 + #{null ≥ observed}) / (1 + K)`.
pub fn empirical_p(exceed: usize, n_simulations: usize) -> f64 {
    (1 + exceed) as f64 / (1 + n_simulations) as f64
}

/// Leave-one-out IVW coefficients for every SNP.
fn loo_estimates(x: &Matrix, y: &[f64], w: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = x.ncols();
    let (xtwx, xtwy) = normal_equations(x, y, w);
    (0..x.nrows())
        .map(|i| {
            let row = x.row(i);
            let mut a = xtwx.clone();
            let mut b = xtwy.clone();
            for j in 0..d {
                b[j] -= w[i] * row[j] * y[i];
                for k in 0..d {
                    a[(j, k)] -= w[i] * row[j] * row[k];
                }
            }
            Ok(Cholesky::new(&a)?.solve(&b))
        })
        .collect()
}

fn loo_rss(x: &Matrix, y: &[f64], w: &[f64]) -> Result<f64> {
    let loo = loo_estimates(x, y, w)?;
    Ok(loo
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let r = y[i] - dot(x.row(i), t);
            w[i] * r * r
        })
        .sum())
}

fn check_size(data: &SummaryDataset) -> Result<()> {
    if data.n() <= data.d() + 1 {
        return Err(MrError::TooFewSnps {
            n: data.n(),
            d: data.d(),
            required: data.d() + 1,
        });
    }
    Ok(())
}

/// Null draws for one SNP: `n_simulations` rows of `d` exposure betas
/// followed by one outcome beta.
fn simulate_snp(
    data: &SummaryDataset,
    i: usize,
    loo_theta: &[f64],
    cfg: &PressoConfig,
) -> Vec<f64> {
    let r = &data.records()[i];
    let d = data.d();
    let mean_y = dot(&r.beta_exposure, loo_theta);
    let mut rng = McRng::keyed(cfg.seed, &r.snp_id);
    let mut out = Vec::with_capacity(cfg.n_simulations * (d + 1));
    for _ in 0..cfg.n_simulations {
        for j in 0..d {
            let bx = if cfg.perturb_exposures {
                rng.normal_with(r.beta_exposure[j], r.se_exposure[j])
            } else {
                r.beta_exposure[j]
            };
            out.push(bx);
        }
        out.push(rng.normal_with(mean_y, r.se_outcome));
    }
    out
}

struct Prepared {
    x: Matrix,
    y: Vec<f64>,
    w: Vec<f64>,
    loo: Vec<Vec<f64>>,
    draws: Vec<Vec<f64>>,
}

fn prepare(data: &SummaryDataset, cfg: &PressoConfig) -> Result<Prepared> {
    cfg.validate()?;
    check_size(data)?;
    let x = data.exposure_matrix();
    let y = data.beta_outcome();
    let w = data.outcome_precision();
    let loo = loo_estimates(&x, &y, &w)?;
    let draws = (0..data.n())
        .map(|i| simulate_snp(data, i, &loo[i], cfg))
        .collect();
    Ok(Prepared {
        x,
        y,
        w,
        loo,
        draws,
    })
}

pub fn presso_global(data: &SummaryDataset, cfg: &PressoConfig) -> Result<PressoGlobal> {
    let p = prepare(data, cfg)?;
    let (n, d) = (data.n(), data.d());
    let rss_observed = loo_rss(&p.x, &p.y, &p.w)?;

    let mut exceed = 0;
    let mut xs = Matrix::zeros(n, d);
    let mut ys = vec![0.0; n];
    for k in 0..cfg.n_simulations {
        for i in 0..n {
            let row = &p.draws[i][k * (d + 1)..(k + 1) * (d + 1)];
            for j in 0..d {
                xs[(i, j)] = row[j];
            }
            ys[i] = row[d];
        }
        // a degenerate simulated set counts as not exceeding
        if let Ok(rss) = loo_rss(&xs, &ys, &p.w) {
            if rss >= rss_observed {
                exceed += 1;
            }
        }
    }
    Ok(PressoGlobal {
        rss_observed,
        p_value: empirical_p(exceed, cfg.n_simulations),
        n_simulations: cfg.n_simulations,
    })
}

/// Per-SNP outlier test: the observed leave-one-out residual of each SNP
/// against the residuals of its simulated null draws around the same
/// leave-one-out estimate. Flags at `alpha / n`, then refits without them.
pub fn presso_outlier_test(data: &SummaryDataset, cfg: &PressoConfig) -> Result<OutlierReport> {
    let p = prepare(data, cfg)?;
    let (n, d) = (data.n(), data.d());
    let mut statistic = Vec::with_capacity(n);
    let mut per_snp_p = Vec::with_capacity(n);
    for i in 0..n {
        let theta = &p.loo[i];
        let observed = p.y[i] - dot(p.x.row(i), theta);
        let observed_sq = observed * observed;
        let exceed = p.draws[i]
            .chunks_exact(d + 1)
            .filter(|row| {
                let e = row[d] - dot(&row[..d], theta);
                e * e >= observed_sq
            })
            .count();
        statistic.push(p.w[i] * observed_sq);
        per_snp_p.push(empirical_p(exceed, cfg.n_simulations));
    }
    let ids: Vec<String> = data.snp_ids().map(String::from).collect();
    let flagged = bonferroni_flags(&ids, &per_snp_p, cfg.alpha);
    let refit = refit_without(data, &flagged, "presso")?;
    Ok(OutlierReport {
        method_label: "presso".into(),
        snp_ids: ids,
        statistic,
        per_snp_p,
        flagged,
        threshold_description: format!(
            "empirical p < {}/{} over {} simulations",
            cfg.alpha, n, cfg.n_simulations
        ),
        refit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SnpRecord;

    #[test]
    fn add_one_estimator() {
        assert_eq!(empirical_p(0, 999), 0.001);
        assert_eq!(empirical_p(999, 999), 1.0);
    }

    #[test]
    fn loo_matches_refit() {
        let recs: Vec<SnpRecord> = (0..6)
            .map(|i| {
                SnpRecord::new(
                    format!("s{i}"),
                    vec![1.0 + i as f64, ((i * 7) % 5) as f64 - 1.5],
                    vec![0.1, 0.1],
                    0.3 * i as f64 + 0.2 * (i % 2) as f64,
                    0.1 + 0.02 * i as f64,
                )
            })
            .collect();
        let data = SummaryDataset::new(recs, 2).unwrap();
        let loo = loo_estimates(
            &data.exposure_matrix(),
            &data.beta_outcome(),
            &data.outcome_precision(),
        )
        .unwrap();
        for (i, id) in data.snp_ids().enumerate() {
            let fit = crate::ivw::ivw_fit(&data.drop_snps(&[id]).unwrap()).unwrap();
            for j in 0..2 {
                assert!((fit.coefficients[j] - loo[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn config_validation() {
        let recs = (0..5)
            .map(|i| SnpRecord::single(format!("s{i}"), 1.0 + i as f64, 0.1, 0.5, 0.1))
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        let cfg = PressoConfig {
            n_simulations: 99,
            ..Default::default()
        };
        assert!(matches!(presso_global(&data, &cfg), Err(MrError::InvalidConfig(_))));
    }

    #[test]
    fn needs_d_plus_two_snps() {
        let recs = (0..2)
            .map(|i| SnpRecord::single(format!("s{i}"), 1.0 + i as f64, 0.1, 0.5, 0.1))
            .collect();
        let data = SummaryDataset::new(recs, 1).unwrap();
        assert!(matches!(
            presso_outlier_test(&data, &PressoConfig::default()),
            Err(MrError::TooFewSnps { .. })
        ));
    }
}
