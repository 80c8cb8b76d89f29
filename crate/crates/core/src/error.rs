use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("unit mismatch: {left} vs {right}")]
    UnitMismatch { left: String, right: String },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("matrix is rank deficient (condition number {condition_number:e})")]
    RankDeficient { condition_number: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("unknown link `{0}`")]
    UnknownLink(String),

    #[error("unknown end effector `{0}`")]
    UnknownEndEffector(String),

    #[error("parse error{}: {message}", location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Parse {
        message: String,
        location: Option<String>,
    },

    #[error("validation failed for {field}: {rule}")]
    Validation { field: String, rule: String },

    #[error("configuration error for {field}: {message}")]
    Config { field: String, message: String },

    #[error("empty window")]
    EmptyWindow,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("numerical divergence at step {step} (t = {t:.4} s): joint speed {speed:e} rad/s")]
    NumericalDivergence { step: usize, t: f64, speed: f64 },

    #[error("controller failure at step {step} (t = {t:.4} s): {source}")]
    Controller {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            rule: rule.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnitMismatch { .. } => "unit_mismatch",
            Error::ZeroMatrix => "zero_matrix",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::OutOfRange(_) => "out_of_range",
            Error::UnknownLink(_) => "unknown_link",
            Error::UnknownEndEffector(_) => "unknown_end_effector",
            Error::Parse { .. } => "parse_error",
            Error::Validation { .. } => "validation_error",
            Error::Config { .. } => "config_error",
            Error::EmptyWindow => "empty_window",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NumericalDivergence { .. } => "numerical_divergence",
            Error::Controller { .. } => "controller_error",
            Error::Io { .. } => "io_error",
        }
    }
}
