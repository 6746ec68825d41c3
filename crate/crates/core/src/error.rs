use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} syntax error at {line}:{col}: {msg}")]
    Syntax {
        what: &'static str,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("grammar restriction: {0}")]
    Grammar(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("transition {transition} is not enabled in {marking}")]
    Firing { transition: String, marking: String },

    #[error("1-safety violated: place {place} would carry two tokens after {}", witness.join(" "))]
    Safety { place: String, witness: Vec<String> },

    #[error("unbound atom {0}")]
    UnboundAtom(String),

    #[error("name collision: {0}")]
    NameCollision(String),

    #[error("invalid firing sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid sdn input: {0}")]
    Sdn(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn syntax(what: &'static str, line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            what,
            line,
            col,
            msg: msg.into(),
        }
    }
}
