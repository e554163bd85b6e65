use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (unknown vertex, duplicate edge, bad arity, ...).
    #[error("input error: {0}")]
    Input(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured resource cap would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The input is outside the hypotheses a verdict needs.
    #[error("verdict unavailable: {0}")]
    Verdict(String),

    /// An internal cross-check failed. On finite instances this means a
    /// theorem the library relies on has been violated by the implementation.
    #[error("internal defect: {0}")]
    Defect(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn defect(msg: impl Into<String>) -> Self {
        Error::Defect(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            Error::Defect(_) => 3,
            _ => 1,
        }
    }
}
