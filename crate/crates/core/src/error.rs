use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element `{atom}` in set `{set}`")]
    DuplicateElement { set: String, atom: String },

    #[error("`{atom}` is not an element of `{set}`")]
    UnknownElement { set: String, atom: String },

    #[error("function table is not total on `{set}`: missing `{atom}`")]
    NotTotal { set: String, atom: String },

    #[error("domain mismatch: expected `{expected}`, found `{found}`")]
    DomainMismatch { expected: String, found: String },

    #[error("codomain mismatch: `{left}` vs `{right}`")]
    CodomainMismatch { left: String, right: String },

    #[error("arrows are not parallel: {0}")]
    NotParallel(String),

    #[error("size limit exceeded while enumerating {what}: {size} > {cap}")]
    SizeLimit {
        what: String,
        size: String,
        cap: u64,
    },

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),

    #[error("not a cone: {0}")]
    NotACone(String),

    #[error("no unique factorization: {0}")]
    NoFactorization(String),

    #[error("subobjects have different parents")]
    ParentMismatch,

    #[error("not closed: {0}")]
    NotClosed(String),

    #[error("square component `{0}` is not monic")]
    NotMonic(String),

    #[error("square does not commute: {0}")]
    NotCommuting(String),

    #[error("causal model has a dependency cycle: {}", .cycle.join(" -> "))]
    CyclicModel { cycle: Vec<String> },

    #[error("invalid causal model: {0}")]
    DomainError(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value `{value}` is outside the domain of `{var}`")]
    ValueOutOfDomain { var: String, value: String },

    #[error("unknown exogenous tuple `{0}`")]
    UnknownTuple(String),

    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch {
        term: String,
        expected: String,
        found: String,
    },

    #[error("formula has {} free variables ({}), expected exactly one", .0.len(), .0.join(", "))]
    MultipleFreeVars(Vec<String>),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn size_limit(what: impl Into<String>, size: impl ToString, cap: u64) -> Self {
        Error::SizeLimit {
            what: what.into(),
            size: size.to_string(),
            cap,
        }
    }
}
