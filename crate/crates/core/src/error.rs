use thiserror::Error;

use crate::automaton::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate event `{0}` in alphabet")]
    DuplicateEvent(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("nondeterministic transition: state {state} already has a transition on `{event}`")]
    Nondeterministic { state: usize, event: String },

    #[error("invalid automaton `{name}`: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { name: String, violations: Vec<Violation> },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("event `{0}` is declared both controllable and uncontrollable")]
    ControllabilityConflict(String),

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("oracle size guard: product has {states} states, limit is {limit}")]
    OracleTooLarge { states: usize, limit: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("empty automaton list")]
    EmptyList,

    #[error("supervisor rejected: {0}")]
    Supervisor(String),
}

/// A parse failure with a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}
