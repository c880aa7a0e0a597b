use std::fmt;
use std::path::Path;

/// Exit code for validation failures (bad values, bad flags).
pub const EXIT_VALIDATION: i32 = 1;
/// Exit code for unreadable files and malformed documents.
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    /// Malformed JSON or a document that does not match its schema.
    Parse(String),
    Schema(String),
    Invalid(zgraphon_core::Error),
    Usage(String),
    InFile(String, Box<CliError>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) | CliError::Schema(_) => EXIT_PARSE,
            CliError::Invalid(_) | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::InFile(_, inner) => inner.exit_code(),
        }
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ CliError::Io(_) => e,
            e => CliError::InFile(path.display().to_string(), Box::new(e)),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "cannot read {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Invalid(e) => write!(f, "{}: {e}", e.code()),
            CliError::Usage(m) => write!(f, "invalid argument: {m}"),
            CliError::InFile(path, inner) => write!(f, "{path}: {inner}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<zgraphon_core::Error> for CliError {
    fn from(e: zgraphon_core::Error) -> Self {
        CliError::Invalid(e)
    }
}
