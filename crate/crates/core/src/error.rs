//! Error type shared by all modules of the crate.

use alloc::string::String;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid relation symbol: {0}")]
    InvalidRelation(String),
    #[error("relation {symbol} expects {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("relation {symbol} is not supported over {domain}")]
    UnsupportedSymbol { domain: String, symbol: String },
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("value {value} does not belong to {domain}")]
    ValueOutOfDomain { value: String, domain: String },
    #[error("invalid value `{0}`")]
    InvalidValue(String),
    #[error("identifier `{0}` is reserved for generated names")]
    ReservedIdentifier(String),
    #[error("generated name `{0}` collides with an existing identifier")]
    NameCollision(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("unknown element or node `{0}`")]
    UnknownName(String),
    #[error("edge {from} -> {to} refers to an undeclared node")]
    DanglingEdge { from: String, to: String },
    #[error("node {0} has no successor")]
    NoSuccessor(String),
    #[error("node {node} has no register value for variable {var}")]
    MissingRegister { node: String, var: String },
    #[error("variable {0} is not declared in the model")]
    MissingVariable(String),
    #[error("malformed tree: {0}")]
    InvalidTree(String),
    #[error("tree depth {depth} is smaller than the required constraint depth {needed}")]
    TreeTooShallow { depth: usize, needed: usize },
    #[error("node {node} carries {prop} but lies above depth {needed}")]
    LabelTooShallow {
        node: String,
        prop: String,
        needed: usize,
    },
    #[error("window expansion exceeds the limit of {limit} windows")]
    TooManyWindows { limit: usize },
    #[error("structure has {size} elements; the finite evaluator is limited to {limit}")]
    StructureTooLarge { size: usize, limit: usize },
    #[error("variable `{0}` is not bound by the assignment")]
    UnboundVariable(String),
    #[error("free variables do not match the expected interface: {0}")]
    FreeVariableMismatch(String),
    #[error("formula is outside the CTL fragment: {0}")]
    NotCtl(String),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(String),
    #[error("{0}")]
    Unsupported(String),
}
