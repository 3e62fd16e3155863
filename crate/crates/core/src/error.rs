use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),

    #[error("unknown edge id {0}")]
    UnknownEdge(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("rule {lhs} -> {rhs} does not decrease in shortlex order")]
    NonReducingRule { lhs: String, rhs: String },

    #[error("rewriting system not confluent: overlap {overlap} reduces to {left} and {right}")]
    NotConfluent {
        overlap: String,
        left: String,
        right: String,
    },

    #[error("invalid generating pair: {0}")]
    InvalidPair(String),

    #[error("generator {0} is not reached from the base coset")]
    NotGenerating(String),

    #[error("enumeration budget of {cap} elements exceeded")]
    BudgetExceeded { cap: usize },

    #[error("invalid graph of groups: {0}")]
    InvalidGraphOfGroups(String),

    #[error("embedding on edge {edge} is not an injective homomorphism: {reason}")]
    BadEmbedding { edge: u64, reason: String },

    #[error("splitting at edge {0} is trivial")]
    TrivialSplitting(u64),

    #[error("probe set reaches the boundary sphere at radius {radius}")]
    ProbeTooLarge { radius: usize },

    #[error("witness and truncation are built over different generating pairs")]
    PairMismatch,

    #[error("witness is not proper: {0}")]
    ImproperWitness(String),

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("bad specification: {0}")]
    Spec(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
