use thiserror::Error;

use crate::packing::PackingReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("shift {shift} exceeds the margin budget {margin}")]
    ShiftOutOfBudget { shift: String, margin: u64 },
    #[error("translator range exceeds the margin: {0}")]
    RangeExceedsMargin(String),
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unknown primitive or set name `{0}`")]
    UnknownPrimitive(String),
    #[error("{0} is not available in this group")]
    KindMismatch(String),
    #[error("operands live on different universes or scales")]
    ScaleMismatch,
    #[error("enumeration budget exceeded: {needed} candidates, cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },
    #[error("search budget exceeded after {} nodes; best family has {} members", .0.stats.nodes, .0.value)]
    SearchBudgetExceeded(Box<PackingReport>),
    #[error("no translate avoiding the set within |y| <= {bound}")]
    AvoidanceNotFound { bound: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("reduced word of length {len} exceeds the length bound {max}")]
    LengthExceeded { len: usize, max: usize },
    #[error("word length bound {max_len} leaves translate {translator} with no decided points")]
    LengthBudgetTooSmall { max_len: usize, translator: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error reports an exhausted search or enumeration budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::SearchBudgetExceeded(_)
        )
    }
}
