use std::fmt;

use thiserror::Error;

/// A syntax error in an expression file, positioned at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("empty input")]
    EmptyInput,
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("support of {size} variables exceeds the cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },
    #[error("universe of {size} variables exceeds the search cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("expression is not monotone (contains a negation)")]
    NotMonotone,
    #[error("term of size {size} exceeds the limit of {limit}")]
    TermTooLarge { size: usize, limit: usize },
    #[error("formula is constant and has no graph representation")]
    ConstantFormula,
    #[error("graph is not acyclic")]
    Cyclic,
    #[error("graph is not connected")]
    Disconnected,
    #[error("search budget of {0} states exhausted")]
    BudgetExhausted(u64),
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("no answer available for variable `{0}`")]
    AnswersExhausted(String),
    #[error("parameter {value} out of range for family `{family}`")]
    FamilyParameter { family: String, value: usize },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("ambiguous column `{0}`")]
    AmbiguousColumn(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("empty DNF")]
    EmptyDnf,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
