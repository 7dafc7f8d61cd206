//! Numerical primitives used by the estimators.

pub mod distributions;
pub mod linalg;
pub mod median;
pub mod rng;
pub mod wls;

pub use distributions::{chi2_quantile, chi2_sf, normal_two_sided_p, ChiSquared};
pub use linalg::{Cholesky, Matrix};
pub use median::{median, weighted_median};
pub use rng::{stable_hash, McRng};
pub use wls::{weighted_ls, WlsFit};
