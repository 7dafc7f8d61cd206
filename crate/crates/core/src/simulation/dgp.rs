//! Individual-level data generation and summary-statistic extraction.
//!
//! For every replicate:
//!
//! * minor allele frequencies `maf_i ~ U(0.01, 0.5)`, genotypes
//!   `G_i ~ Bin(2, maf_i)`;
//! * first-stage coefficients `γ_ij ~ N(1, first_stage_sd)`, rescaled so the
//!   SNPs explain `r2_first_stage` of each unit-variance exposure;
//! * a confounder `U ~ N(0, 1)` explaining `r2_confounder` of each exposure,
//!   and exposure errors with a common pairwise correlation;
//! * a hidden pleiotropic pathway `P = Σ_i a_i s G_i` where `a_i` is zero for
//!   valid SNPs and drawn from the outlier distribution for exactly
//!   `round(p n)` SNPs (then multiplied by [`SimConfig::effect_scale`]), and
//!   `s` is the first exposure's coefficient scale;
//! * the outcome `Y = Σ_j θ_j X_j + pleiotropy_effect · P + c U + ε` with the
//!   noise scaled so the exposures and pathway explain `r2_second_stage`.
//!
//! Summary statistics come from per-SNP simple linear regressions.

use crate::data::{SnpRecord, SummaryDataset};
use crate::error::{MrError, Result};
use crate::stats::{Matrix, McRng};

use super::config::{EffectDist, PleiotropyMode, SimConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub data: SummaryDataset,
    pub true_outliers: Vec<String>,
    pub true_theta: Vec<f64>,
}

pub fn snp_name(i: usize) -> String {
    format!("snp{:03}", i + 1)
}

fn draw_effect(rng: &mut McRng, dist: EffectDist, mode: PleiotropyMode) -> f64 {
    let a = match dist {
        EffectDist::Uniform { lo, hi } => rng.uniform_range(lo, hi),
        EffectDist::Normal { mean, sd } => rng.normal_with(mean, sd),
    };
    match mode {
        PleiotropyMode::Directional => a,
        PleiotropyMode::Balanced => {
            if rng.uniform() < 0.5 {
                -a
            } else {
                a
            }
        }
    }
}

/// Genotypes for one SNP: two Bernoulli draws per individual from the two
/// halves of a 64-bit word.
fn draw_genotypes(rng: &mut McRng, maf: f64, out: &mut [u8]) {
    let t = (maf * 4_294_967_296.0) as u64;
    for g in out.iter_mut() {
        let r = rng.next_u64();
        *g = ((r & 0xffff_ffff) < t) as u8 + ((r >> 32) < t) as u8;
    }
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Raw sums over one cohort slice for the per-SNP regressions.
struct Sums {
    m: f64,
    sg: f64,
    sgg: f64,
    sgx: Vec<f64>,
    sgy: f64,
}

pub fn generate_replicate(cfg: &SimConfig, run_index: u64) -> Result<Replicate> {
    cfg.validate()?;
    let mut rng = McRng::substream(cfg.seed, run_index);
    let (n, d, big_n) = (cfg.n_snps, cfg.n_exposures, cfg.n_individuals);

    let maf: Vec<f64> = (0..n).map(|_| rng.uniform_range(0.01, 0.5)).collect();
    let gamma: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..n).map(|_| rng.normal_with(1.0, cfg.first_stage_sd)).collect())
        .collect();
    let outliers = rng.sample_indices(n, cfg.n_outliers());
    let mut effect = vec![0.0; n];
    for &i in &outliers {
        effect[i] = cfg.effect_scale()
            * draw_effect(&mut rng, cfg.outlier_effect_dist, cfg.pleiotropy_mode);
    }

    let geno_var: Vec<f64> = maf.iter().map(|p| 2.0 * p * (1.0 - p)).collect();
    let scale: Vec<f64> = gamma
        .iter()
        .map(|g| {
            let v: f64 = g.iter().zip(&geno_var).map(|(c, v)| c * c * v).sum();
            if v > 0.0 {
                (cfg.r2_first_stage / v).sqrt()
            } else {
                0.0
            }
        })
        .collect();

    let mut genotypes = vec![0u8; n * big_n];
    for (i, p) in maf.iter().enumerate() {
        draw_genotypes(&mut rng, *p, &mut genotypes[i * big_n..(i + 1) * big_n]);
    }

    // exposures: genetic score + confounder + correlated error
    let err_var = 1.0 - cfg.r2_first_stage - cfg.r2_confounder;
    let rho = cfg.exposure_error_correlation;
    let conf_x = cfg.r2_confounder.sqrt();
    let mut u = vec![0.0; big_n];
    let mut x = vec![vec![0.0; big_n]; d];
    for k in 0..big_n {
        u[k] = rng.normal();
        let shared = rng.normal();
        for xj in x.iter_mut() {
            let e = rho.sqrt() * shared + (1.0 - rho).sqrt() * rng.normal();
            xj[k] = conf_x * u[k] + err_var.sqrt() * e;
        }
    }
    let mut pleio = vec![0.0; big_n];
    for i in 0..n {
        let g = &genotypes[i * big_n..(i + 1) * big_n];
        for j in 0..d {
            let c = scale[j] * gamma[j][i];
            for (xk, gk) in x[j].iter_mut().zip(g) {
                *xk += c * *gk as f64;
            }
        }
        if effect[i] != 0.0 {
            let c = scale[0] * effect[i];
            for (pk, gk) in pleio.iter_mut().zip(g) {
                *pk += c * *gk as f64;
            }
        }
    }

    let signal: Vec<f64> = (0..big_n)
        .map(|k| {
            let mut s = cfg.pleiotropy_effect * pleio[k];
            for j in 0..d {
                s += cfg.causal_effects[j] * x[j][k];
            }
            s
        })
        .collect();
    let var_signal = sample_variance(&signal);
    // the confounder keeps its first-stage coefficient; the noise tops the
    // outcome variance up to var(signal) / r2_second_stage
    let conf_y = conf_x;
    let residual_var = if var_signal > 0.0 {
        var_signal * (1.0 - cfg.r2_second_stage) / cfg.r2_second_stage
    } else {
        1.0
    };
    let noise_sd = (residual_var - conf_y * conf_y).max(0.0).sqrt();
    let y: Vec<f64> = (0..big_n)
        .map(|k| signal[k] + conf_y * u[k] + noise_sd * rng.normal())
        .collect();

    let (exp_range, out_range) = if cfg.two_sample_split {
        (0..big_n / 2, big_n / 2..big_n)
    } else {
        (0..big_n, 0..big_n)
    };

    let m_exp = exp_range.len() as f64;
    let xs: Vec<&[f64]> = x.iter().map(|v| &v[exp_range.clone()]).collect();
    let x_mean: Vec<f64> = xs.iter().map(|v| v.iter().sum::<f64>() / m_exp).collect();
    // centered cross-products of the exposures
    let mut sxx = Matrix::zeros(d, d);
    for j in 0..d {
        for k in 0..=j {
            let s: f64 = xs[j]
                .iter()
                .zip(xs[k])
                .map(|(a, b)| (a - x_mean[j]) * (b - x_mean[k]))
                .sum();
            sxx[(j, k)] = s;
            sxx[(k, j)] = s;
        }
    }
    let ys = &y[out_range.clone()];
    let m_out = ys.len() as f64;
    let y_mean = ys.iter().sum::<f64>() / m_out;
    let syy: f64 = ys.iter().map(|v| (v - y_mean).powi(2)).sum();

    let mut records = Vec::with_capacity(n);
    let mut covs = Vec::with_capacity(n);
    for i in 0..n {
        let g = &genotypes[i * big_n..(i + 1) * big_n];
        let exp = sums(&g[exp_range.clone()], &xs, None);
        let out = sums(&g[out_range.clone()], &[], Some(ys));

        let id = snp_name(i);
        let sgg_e = exp.sgg - exp.sg * exp.sg / exp.m;
        let sgg_o = out.sgg - out.sg * out.sg / out.m;
        if !(sgg_e > 0.0 && sgg_o > 0.0) {
            return Err(MrError::InvalidValue {
                row: i + 1,
                column: id,
                reason: "simulated SNP is monomorphic".into(),
            });
        }
        let sgx: Vec<f64> = (0..d)
            .map(|j| exp.sgx[j] - exp.sg * x_mean[j])
            .collect();
        let bx: Vec<f64> = sgx.iter().map(|s| s / sgg_e).collect();
        let mut cov = Matrix::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                cov[(j, k)] =
                    (sxx[(j, k)] - sgx[j] * sgx[k] / sgg_e) / ((exp.m - 2.0) * sgg_e);
            }
        }
        let sx: Vec<f64> = (0..d).map(|j| cov[(j, j)].sqrt()).collect();
        let sgy = out.sgy - out.sg * y_mean;
        let by = sgy / sgg_o;
        let sy = ((syy - sgy * sgy / sgg_o) / ((out.m - 2.0) * sgg_o)).sqrt();
        records.push(SnpRecord::new(id, bx, sx, by, sy));
        covs.push(cov);
    }

    let mut data = SummaryDataset::new(records, d)?;
    if d > 1 {
        data = data.with_exposure_cov(covs)?;
    }
    Ok(Replicate {
        data,
        true_outliers: outliers.iter().map(|&i| snp_name(i)).collect(),
        true_theta: cfg.causal_effects.clone(),
    })
}

fn sums(g: &[u8], xs: &[&[f64]], y: Option<&[f64]>) -> Sums {
    let mut sg = 0u64;
    let mut sgg = 0u64;
    for &v in g {
        sg += v as u64;
        sgg += (v * v) as u64;
    }
    let sgx = xs
        .iter()
        .map(|x| g.iter().zip(*x).map(|(a, b)| *a as f64 * b).sum())
        .collect();
    let sgy = y.map_or(0.0, |y| g.iter().zip(y).map(|(a, b)| *a as f64 * b).sum());
    Sums {
        m: g.len() as f64,
        sg: sg as f64,
        sgg: sgg as f64,
        sgx,
        sgy,
    }
}
