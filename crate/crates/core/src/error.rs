use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group order {order} exceeds the size budget of {budget} elements")]
    SizeBudget { order: usize, budget: usize },

    #[error("malformed Cayley table: {0}")]
    MalformedCayley(String),

    #[error("table is not a group: {0}")]
    NotAGroup(String),

    #[error("unsupported group parameters: {0}")]
    BadGroupSpec(String),

    #[error("sets belong to different groups")]
    GroupMismatch,

    #[error("element {elem} is out of range for a group of order {order}")]
    OutOfRange { elem: i64, order: usize },

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("feasibility guard: {0}")]
    Infeasible(String),

    #[error("set cannot be covered by translates from the pool")]
    NotCoverable,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("map is not an exact homomorphism (defect {0})")]
    NotExact(String),

    #[error("map does not send the identity to 0")]
    IdentityNotZero,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("VC-dimension search reached the cap of {0}")]
    VcCapHit(usize),

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("theorem violation (internal bug): {0}")]
    TheoremViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
