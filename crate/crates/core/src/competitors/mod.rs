//! Reference outlier detectors and robust estimators: MR-PRESSO, radial MR
//! and the (weighted) median estimator.

pub mod median;
pub mod presso;
pub mod radial;

pub use crate::outlier::OutlierReport;
pub use median::{median_estimator, median_point, MedianConfig};
pub use presso::{presso_global, presso_outlier_test, PressoConfig, PressoGlobal};
pub use radial::{radial_mr, radial_points_csv, RadialPoint, RadialResult};
