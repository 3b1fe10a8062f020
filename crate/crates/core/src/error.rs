use thiserror::Error;

/// Broad failure category, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or malformed caller input.
    Usage,
    /// Dataset, CSV or model-file problems.
    Data,
    /// Numerical integrity or physicality failures.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric integrity violated: {0}")]
    NumericIntegrity(String),

    #[error("feature {index} = {value} is outside {expected}")]
    Range {
        index: usize,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("no outcome has positive expectation ({minus}, {plus}, {zero})")]
    NoSupport { minus: f64, plus: f64, zero: f64 },

    #[error("model is unphysical: expectation {value} for outcome {outcome} is negative")]
    Unphysical { outcome: i8, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot load model: {0}")]
    Load(String),

    #[error("dof {dof}: {source}")]
    Dof {
        dof: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_) | Error::Config(_) => ErrorKind::Usage,
            Error::Range { .. }
            | Error::Degenerate(_)
            | Error::Training(_)
            | Error::Data(_)
            | Error::Load(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorKind::Data,
            Error::NumericIntegrity(_) | Error::NoSupport { .. } | Error::Unphysical { .. } => {
                ErrorKind::Numeric
            }
            Error::Dof { source, .. } => source.kind(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
