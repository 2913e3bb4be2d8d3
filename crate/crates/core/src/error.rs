use thiserror::Error;

use crate::scenarios::InfeasibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not hermitian (max |M - M†| = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("squeezing parameter out of range: {0}")]
    Regime(String),

    #[error("no eigenpair of L(lambda) passed the residual and truncation gates")]
    NoTrustedEigenstates,

    #[error(
        "truncation not trusted: tail weight {tail_weight:.3e} exceeds {threshold:.1e}{}",
        suggested_dim.map(|d| format!(" (try dim {d})")).unwrap_or_default()
    )]
    UntrustedTruncation {
        tail_weight: f64,
        threshold: f64,
        suggested_dim: Option<usize>,
    },

    #[error("probe carries no signal: {0}")]
    UnusableProbe(String),

    #[error("degenerate probe: energy standard deviation is zero")]
    DegenerateProbe,

    #[error("sample mean {mean} is outside the monotone range [{lo}, {hi}] of the response curve")]
    OutOfRange { mean: f64, lo: f64, hi: f64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no qualifying state: {0}")]
    NoQualifyingState(String),

    #[error("infeasible design: {}", .0.reason)]
    Infeasible(Box<InfeasibilityReport>),

    #[error("dimension {dim} exceeds the dense linear algebra limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::Regime(_) => "regime",
            Error::NoTrustedEigenstates => "no_trusted_eigenstates",
            Error::UntrustedTruncation { .. } => "untrusted_truncation",
            Error::UnusableProbe(_) => "unusable_probe",
            Error::DegenerateProbe => "degenerate_probe",
            Error::OutOfRange { .. } => "out_of_range",
            Error::EmptyInput(_) => "empty_input",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoQualifyingState(_) => "no_qualifying_state",
            Error::Infeasible(_) => "infeasible",
            Error::TooLarge { .. } => "too_large",
            Error::Linalg(_) => "linalg",
            Error::File { source, .. } => source.kind(),
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn in_file(self, path: &std::path::Path) -> Self {
        Error::File {
            path: path.display().to_string(),
            source: Box::new(self),
        }
    }
}
