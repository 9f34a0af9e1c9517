use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("t = {t} lies outside the basis domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    /// The basis matrix at the observed grid does not have full column rank.
    #[error(
        "rank-deficient basis matrix: basis function {basis_index} (support [{span_lo}, {span_hi}]) \
         has no grid point of its own"
    )]
    RankDeficientBasis {
        basis_index: usize,
        span_lo: f64,
        span_hi: f64,
    },

    #[error("smoothing failed for sample {sample}, predictor {predictor}: {source}")]
    Smoothing {
        sample: usize,
        predictor: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Too few samples for the parameter count, or a numerically singular design.
    #[error("condition (C1) violated: {0}")]
    ConditionC1(String),

    #[error("restricted fit for predictor {predictor}: constraint matrix A(Z'Z)^-1 A' is numerically singular")]
    SingularConstraint { predictor: usize },

    #[error("{}:{line}: field `{field}`: {message}", file.display())]
    Data {
        file: PathBuf,
        line: u64,
        field: String,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 1 usage/config, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 1,
            Error::Data { .. } | Error::Shape(_) | Error::OutOfDomain { .. } | Error::Io { .. } => 2,
            Error::RankDeficientBasis { .. }
            | Error::Smoothing { .. }
            | Error::ConditionC1(_)
            | Error::SingularConstraint { .. } => 3,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
