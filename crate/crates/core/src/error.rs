use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Error)]
pub enum ArselError {
    /// A configuration or model parameter is outside its admissible range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Not enough data (innovations, path length, autocovariance lags).
    #[error("insufficient {what}: need {required}, got {actual}")]
    Insufficient {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    /// A Toeplitz or sample covariance matrix failed to factorize.
    #[error("singular {what} at order {order} (smallest pivot {pivot:e})")]
    Singular {
        what: &'static str,
        order: usize,
        pivot: f64,
    },

    /// Baxter ratio requested for a model whose AR tail vanishes.
    #[error("AR coefficient tail is zero beyond order {order}; Baxter ratio undefined")]
    ZeroTail { order: usize },

    /// A logarithmic criterion hit a zero residual variance.
    #[error("degenerate fit: residual variance is zero at order {order}")]
    DegenerateFit { order: usize },

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("replication {run_id} failed in cell {cell}: {source}")]
    Replication {
        run_id: u64,
        cell: String,
        #[source]
        source: Box<ArselError>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

impl ArselError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ArselError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ArselError::InvalidParameter { .. } => "validation",
            ArselError::Insufficient { .. } => "insufficient",
            ArselError::Singular { .. } => "singular",
            ArselError::ZeroTail { .. } => "zero_tail",
            ArselError::DegenerateFit { .. } => "degenerate_fit",
            ArselError::LengthMismatch { .. } => "length_mismatch",
            ArselError::Empty(_) => "empty",
            ArselError::Replication { source, .. } => source.kind(),
            ArselError::Io(_) => "io",
            ArselError::Csv(_) => "csv",
            ArselError::Config(_) => "config",
            ArselError::Image(_) => "image",
        }
    }

    /// The offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            ArselError::InvalidParameter { field, .. } => Some(field),
            ArselError::Replication { source, .. } => source.field(),
            _ => None,
        }
    }
}

pub type Result<T, E = ArselError> = std::result::Result<T, E>;
