use ifm_core::ValidationIssue;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("PARSE_ERROR at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("UNKNOWN_ELEMENT_KIND: `{kind}` at {field}{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    UnknownElementKind {
        kind: String,
        field: String,
        line: Option<usize>,
    },

    #[error("VALIDATION_ERROR: {}", issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Validation { issues: Vec<ValidationIssue> },

    #[error("VALIDATION_ERROR: {field}: {message}")]
    InvalidField { field: String, message: String },

    #[error("NOT_FOUND: no scenario file or bundled scenario named `{0}`")]
    NotFound(String),

    #[error("BAD_PARAM: {0}")]
    BadParam(String),

    #[error("RUNTIME_ERROR: {0}")]
    Core(#[from] ifm_core::Error),

    #[error("IO_ERROR: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::Parse { .. } => "PARSE_ERROR",
            HarnessError::UnknownElementKind { .. } => "UNKNOWN_ELEMENT_KIND",
            HarnessError::Validation { .. } | HarnessError::InvalidField { .. } => "VALIDATION_ERROR",
            HarnessError::NotFound(_) => "NOT_FOUND",
            HarnessError::BadParam(_) => "BAD_PARAM",
            HarnessError::Core(_) => "RUNTIME_ERROR",
            HarnessError::Io(_) => "IO_ERROR",
        }
    }

    /// 2 for anything the user can fix in the input, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) => match e {
                ifm_core::Error::BadParam(_) | ifm_core::Error::Invalid(_) | ifm_core::Error::UnknownMode(_) => 2,
                _ => 3,
            },
            HarnessError::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
