//! Weighted least squares through the origin.

use super::linalg::{Cholesky, Matrix};
use crate::error::{MrError, Result};

/// Result of a zero-intercept weighted least squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsFit {
    pub coefficients: Vec<f64>,
    /// `(XᵀWX)^{-1}`: the fixed-effect covariance when `w` are inverse variances.
    pub covariance: Matrix,
    pub residuals: Vec<f64>,
    pub weighted_rss: f64,
}

impl WlsFit {
    pub fn standard_errors(&self) -> Vec<f64> {
        self.covariance.diagonal().iter().map(|v| v.sqrt()).collect()
    }
}

/// Minimise `Σ_i w_i (y_i - Σ_j X_ij b_j)²` with no intercept.
///
/// The covariance is `(XᵀWX)^{-1}` with no residual-variance rescaling.
/// Rescaling every weight by `c` leaves the coefficients and residuals
/// untouched and divides the covariance by `c`.
pub fn weighted_ls(x: &Matrix, y: &[f64], w: &[f64]) -> Result<WlsFit> {
    let (n, d) = (x.nrows(), x.ncols());
    if y.len() != n || w.len() != n {
        return Err(MrError::DimensionMismatch(format!(
            "design has {n} rows, response {} and weights {}",
            y.len(),
            w.len()
        )));
    }
    if d == 0 {
        return Err(MrError::DimensionMismatch("design has no columns".into()));
    }
    if n <= d {
        return Err(MrError::TooFewSnps {
            n,
            d,
            required: d,
        });
    }
    if let Some(bad) = w.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(MrError::InvalidValue {
            row: w.iter().position(|v| v == bad).unwrap_or(0),
            column: "weight".into(),
            reason: format!("weights must be positive and finite, got {bad}"),
        });
    }

    let (xtwx, xtwy) = normal_equations(x, y, w);
    let chol = Cholesky::new(&xtwx)?;
    let coefficients = chol.solve(&xtwy);
    let residuals = residuals(x, y, &coefficients);
    let weighted_rss = residuals
        .iter()
        .zip(w)
        .map(|(r, wi)| wi * r * r)
        .sum::<f64>();
    Ok(WlsFit {
        coefficients,
        covariance: chol.inverse(),
        residuals,
        weighted_rss,
    })
}

/// `XᵀWX` and `XᵀWy`.
pub(crate) fn normal_equations(x: &Matrix, y: &[f64], w: &[f64]) -> (Matrix, Vec<f64>) {
    let d = x.ncols();
    let mut xtwx = Matrix::zeros(d, d);
    let mut xtwy = vec![0.0; d];
    for (i, (yi, wi)) in y.iter().zip(w).enumerate() {
        let row = x.row(i);
        for j in 0..d {
            let wx = wi * row[j];
            xtwy[j] += wx * yi;
            for k in 0..=j {
                xtwx[(j, k)] += wx * row[k];
            }
        }
    }
    for j in 0..d {
        for k in 0..j {
            xtwx[(k, j)] = xtwx[(j, k)];
        }
    }
    (xtwx, xtwy)
}

pub(crate) fn residuals(x: &Matrix, y: &[f64], b: &[f64]) -> Vec<f64> {
    y.iter()
        .enumerate()
        .map(|(i, yi)| yi - dot(x.row(i), b))
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
