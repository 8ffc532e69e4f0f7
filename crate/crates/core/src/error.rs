use thiserror::Error;

use crate::report::RunReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid problem: {0}")]
    Validation(String),

    #[error("problem has no heuristic values")]
    MissingHeuristic,

    #[error("branching statistics undefined: no node expanded within depth {depth}")]
    UndefinedStats { depth: usize },

    #[error("root state {root} out of range for {states} states")]
    RootOutOfRange { root: usize, states: usize },

    #[error("register layout mismatch")]
    LayoutMismatch,

    #[error("level {level} action register is not in the ground state")]
    NotGround { level: usize },

    #[error("operator precondition violated: {0}")]
    Precondition(String),

    #[error("dense mode needs 2^{0} amplitudes; limit is 2^{max}", max = crate::state::MAX_DENSE_WIDTH)]
    DenseTooLarge(u32),

    #[error("level {level} out of range for depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("transition undefined for live pair (state {state}, action {action})")]
    CorruptedState { state: usize, action: usize },

    #[error("cannot sample from a zero-norm state")]
    ZeroNorm,

    #[error("invalid depth {0}")]
    InvalidDepth(usize),

    #[error("no marked configurations (a = 0)")]
    NoMarked(Box<RunReport>),

    #[error("oracle query budget exhausted after {} queries", .0.oracle_queries)]
    BudgetExhausted(Box<RunReport>),

    #[error("invalid pipeline: {0}")]
    InvalidPlan(String),
}
