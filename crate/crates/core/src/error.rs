use thiserror::Error;

/// Errors raised across the crate.
///
/// Every variant maps to a stable [`Error::code`] string so callers (the CLI in
/// particular) can tell failure classes apart without matching on text.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("Kraus operators are not complete (max deviation {0:e})")]
    Completeness(f64),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("invalid outcome distribution: {0}")]
    Distribution(String),

    #[error("unknown state name `{0}`")]
    UnknownState(String),

    #[error("state `{name}` expects {expected} parameter(s), got {got}")]
    Arity {
        name: String,
        expected: String,
        got: usize,
    },

    #[error("malformed state file: {0}")]
    MalformedFile(String),

    #[error("state file violates density-matrix invariants: {0}")]
    InvalidStateFile(Box<Error>),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("relative entropy is infinite: support of first state not contained in second (weight {0:e} on null space)")]
    SupportViolation(f64),

    #[error("invalid averaging mode: {0}")]
    Mode(String),
}

impl Error {
    /// Stable, distinct identifier of the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::Dimension(_) => "dimension",
            Error::NotHermitian(_) => "not-hermitian",
            Error::InvalidTrace(_) => "invalid-trace",
            Error::NotPsd(_) => "not-psd",
            Error::Completeness(_) => "channel-completeness",
            Error::Domain(_) => "domain",
            Error::Distribution(_) => "distribution",
            Error::UnknownState(_) => "unknown-state",
            Error::Arity { .. } => "bad-arity",
            Error::MalformedFile(_) => "malformed-file",
            Error::InvalidStateFile(_) => "invalid-state-file",
            Error::Degenerate(_) => "degenerate",
            Error::SupportViolation(_) => "support-violation",
            Error::Mode(_) => "mode",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
