use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("undeclared basis frequency `{0}`")]
    Basis(String),

    #[error("relation analysis refused: {0}")]
    RelationRefused(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numeric guard: {0}")]
    NumericGuard(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Parse(_) | Error::Basis(_) | Error::Io(_) => 2,
            Error::Constraint(_) | Error::Precondition(_) | Error::RelationRefused(_) => 3,
            Error::NumericGuard(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
