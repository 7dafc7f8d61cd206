//! Helpers shared by the integration tests: random datasets and
//! deliberately naive reference computations.

#![allow(dead_code, clippy::needless_range_loop)]

use mr_hetero::{SnpRecord, SummaryDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` SNPs, `d` exposures, ratios scattered around `theta`.
pub fn random_dataset(r: &mut ChaCha8Rng, n: usize, d: usize) -> SummaryDataset {
    let theta: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let recs = (0..n)
        .map(|i| {
            let bx: Vec<f64> = (0..d)
                .map(|_| {
                    let m = r.random_range(0.05..1.0);
                    if r.random_bool(0.5) { m } else { -m }
                })
                .collect();
            let sx: Vec<f64> = (0..d).map(|_| r.random_range(0.005..0.1)).collect();
            let sy = r.random_range(0.01..0.3);
            let by = bx.iter().zip(&theta).map(|(b, t)| b * t).sum::<f64>()
                + r.random_range(-3.0..3.0) * sy;
            SnpRecord::new(format!("rs{i}"), bx, sx, by, sy)
        })
        .collect();
    SummaryDataset::new(recs, d).unwrap()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let d = b.len();
    for c in 0..d {
        let p = (c..d)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..d {
            let f = a[r][c] / a[c][c];
            for k in c..d {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// First-order IVW fit and local q by direct summation.
pub fn brute_force_q(data: &SummaryDataset) -> (Vec<f64>, Vec<f64>) {
    let d = data.d();
    let mut a = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for r in data.records() {
        let w = 1.0 / (r.se_outcome * r.se_outcome);
        for j in 0..d {
            b[j] += w * r.beta_exposure[j] * r.beta_outcome;
            for k in 0..d {
                a[j][k] += w * r.beta_exposure[j] * r.beta_exposure[k];
            }
        }
    }
    let theta = solve(a, b);
    let q = data
        .records()
        .iter()
        .map(|r| {
            let fit: f64 = (0..d).map(|j| theta[j] * r.beta_exposure[j]).sum();
            (r.beta_outcome - fit).powi(2) / (r.se_outcome * r.se_outcome)
        })
        .collect();
    (theta, q)
}

/// Median by full sort.
pub fn sorted_median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}
