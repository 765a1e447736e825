use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error(
        "no eligible quay crane for bay {bay} (total_bays={total_bays}, qc_count={qc_count}, safety_distance={safety_distance})"
    )]
    NoEligibleCrane {
        bay: u32,
        total_bays: u32,
        qc_count: u32,
        safety_distance: u32,
    },

    #[error("invalid decisions: {0}")]
    InvalidDecisions(String),

    #[error("precedence graph has a cycle: the chosen orderings are incompatible")]
    CyclicOrdering,

    #[error("enumeration budget exceeded: {estimated} combinations > limit {limit}")]
    BudgetExceeded { estimated: u128, limit: u128 },

    #[error("no feasible solution exists")]
    NoFeasibleSolution,

    #[error("invalid generator config: {0}")]
    ConfigInvalid(String),

    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
