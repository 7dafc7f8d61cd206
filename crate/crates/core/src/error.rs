use thiserror::Error;

/// Errors produced by the analysis pipeline.
///
/// Variants fall into two families: input validation (bad files, bad
/// arguments) and numerical failure (a fit that cannot be computed).
/// [`MrError::is_numerical`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MrError {
    #[error("MissingColumn: expected column `{expected}` at position {position}, found `{found}`")]
    MissingColumn {
        expected: String,
        position: usize,
        found: String,
    },

    #[error("NonPositiveSE: row {row}, column `{column}` has standard error {value}")]
    NonPositiveSe {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("InvalidValue: row {row}, column `{column}`: {reason}")]
    InvalidValue {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("DuplicateSnp: `{0}` appears more than once")]
    DuplicateSnp(String),

    #[error("UnknownSnp: `{0}` is not in the dataset")]
    UnknownSnp(String),

    #[error("TooFewSnps: {n} instruments for {d} exposure(s), need more than {required}")]
    TooFewSnps { n: usize, d: usize, required: usize },

    #[error("InvalidDf: degrees of freedom must be positive, got {0}")]
    InvalidDf(f64),

    #[error("InvalidP: probability must lie strictly in (0, 1), got {0}")]
    InvalidP(f64),

    #[error("RankDeficient: exposure design matrix is not of full column rank")]
    RankDeficient,

    #[error("EmptyInput: {0}")]
    EmptyInput(&'static str),

    #[error("ZeroExposureBeta: SNP `{0}` has a zero exposure association")]
    ZeroExposureBeta(String),

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("Io: {0}")]
    Io(String),
}

impl MrError {
    /// Short variant name, printed by the CLI on failure.
    pub fn name(&self) -> &'static str {
        match self {
            MrError::MissingColumn { .. } => "MissingColumn",
            MrError::NonPositiveSe { .. } => "NonPositiveSE",
            MrError::InvalidValue { .. } => "InvalidValue",
            MrError::DuplicateSnp(_) => "DuplicateSnp",
            MrError::UnknownSnp(_) => "UnknownSnp",
            MrError::TooFewSnps { .. } => "TooFewSnps",
            MrError::InvalidDf(_) => "InvalidDf",
            MrError::InvalidP(_) => "InvalidP",
            MrError::RankDeficient => "RankDeficient",
            MrError::EmptyInput(_) => "EmptyInput",
            MrError::ZeroExposureBeta(_) => "ZeroExposureBeta",
            MrError::DimensionMismatch(_) => "DimensionMismatch",
            MrError::InvalidConfig(_) => "InvalidConfig",
            MrError::Io(_) => "Io",
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, MrError::RankDeficient | MrError::ZeroExposureBeta(_))
    }
}

impl From<std::io::Error> for MrError {
    fn from(e: std::io::Error) -> Self {
        MrError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MrError>;
