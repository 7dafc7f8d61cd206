//! Summary-level Mendelian randomisation with heterogeneity-based outlier
//! detection.
//!
//! The crate estimates causal effects by inverse-variance weighting
//! ([`ivw`]), computes Cochran's Q and per-instrument q statistics
//! ([`heterogeneity`]), calibrates them with a genomic-control inflation
//! factor to flag pleiotropic instruments ([`gcq`]), and compares against
//! MR-PRESSO, radial MR and median estimators ([`competitors`]). The
//! [`simulation`] module generates individual-level cohorts, extracts
//! summary statistics and benchmarks every detector.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod competitors;
pub mod data;
pub mod error;
pub mod gcq;
pub mod heterogeneity;
pub mod ivw;
pub mod outlier;
pub mod simulation;
pub mod stats;

pub use data::{load_dataset, load_exposure_cov, SnpRecord, SummaryDataset};
pub use error::{MrError, Result};
pub use gcq::{detect_outliers_gcq, estimate_lambda, GcqOptions, GcqResult, GcqWarning};
pub use heterogeneity::{
    cochran_q, local_q_pvalues, q_outlier_test, HeterogeneityResult, SecondOrderVariant,
    WeightScheme,
};
pub use ivw::{ivw_multivariable, ivw_univariable, ratio_estimates, CausalEstimate};
pub use outlier::OutlierReport;
