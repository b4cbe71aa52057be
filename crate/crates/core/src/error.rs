use crate::rational::Rational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("table is not associative: ({i}*{j})*{k} != {i}*({j}*{k})")]
    NotAssociative { i: usize, j: usize, k: usize },

    #[error("table has no two-sided identity")]
    NoIdentity,

    #[error("bad table entry at ({row}, {col}): {detail}")]
    BadIndex {
        row: usize,
        col: usize,
        detail: String,
    },

    #[error("duplicate or missing element names: {0}")]
    BadNames(String),

    #[error("{what} exceeds cap: needed {needed}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: usize,
    },

    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("group is not amenable-capable: {0}")]
    NotAmenableCapable(String),

    #[error("search budget exceeded: {what}, best quality reached {best}")]
    SearchBudgetExceeded { what: String, best: Rational },

    #[error("no supplied finite quotient separates the given elements")]
    NoSeparatingQuotient,

    #[error("witness has no table for element {0}")]
    MissingTable(String),

    #[error("identity table is not the identity map")]
    IdentityViolated,

    #[error("malformed file at line {line}, column {column}: {message}")]
    MalformedFile {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("HypothesesNotMet: {0}")]
    HypothesesNotMet(String),

    #[error("element {0} is a unit; a non-unit is required")]
    NotANonUnit(String),

    #[error("unknown element: {0}")]
    UnknownElement(String),

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("invalid rational {0:?}: expected p/q with q > 0")]
    InvalidRational(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Name of the library module a failure originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::NotAssociative { .. }
            | Error::NoIdentity
            | Error::BadIndex { .. }
            | Error::BadNames(_)
            | Error::UnknownElement(_) => "core-monoid",
            Error::UnsupportedGroup(_)
            | Error::EmptySet(_)
            | Error::NotAmenableCapable(_)
            | Error::SearchBudgetExceeded { .. }
            | Error::NoSeparatingQuotient => "groups",
            Error::MissingTable(_) | Error::IdentityViolated => "witness",
            Error::MalformedFile { .. } => "files",
            Error::HypothesesNotMet(_) | Error::NotANonUnit(_) => "builder",
            Error::UnknownFixture(_) => "fixtures",
            Error::CapExceeded { .. }
            | Error::InvalidRational(_)
            | Error::InvalidArgument(_)
            | Error::Invariant(_)
            | Error::Io(_) => "sofic-core",
        }
    }

    /// Honest refusals, as opposed to bad input or bugs.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::HypothesesNotMet(_)
                | Error::SearchBudgetExceeded { .. }
                | Error::NotAmenableCapable(_)
                | Error::NoSeparatingQuotient
                | Error::CapExceeded { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedFile {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
