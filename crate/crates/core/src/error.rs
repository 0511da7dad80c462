use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring context: {0}")]
    InvalidContext(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precision exhausted: Smith exponent {exponent} lies in the window ({guard}, {prec}) at stage {stage}")]
    PrecisionExhausted {
        exponent: u32,
        guard: u32,
        prec: u32,
        stage: &'static str,
    },

    #[error("invalid group data: {0}")]
    InvalidGroup(String),

    #[error("invalid module data: {0}")]
    InvalidModule(String),

    #[error("cocycle identity fails at triple ({0}, {1}, {2})")]
    InvalidCocycle(usize, usize, usize),

    #[error("subgroup is not normal: conjugate of element {element} by {by} leaves the subgroup")]
    NotNormal { element: usize, by: usize },

    #[error("subgroup is not abelian: elements {0} and {1} do not commute")]
    NotAbelian(usize, usize),

    #[error("not a lattice: module carries relations")]
    NotALattice,

    #[error("group size {size} exceeds the configured budget {budget}")]
    SizeBudget { size: usize, budget: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("search exhausted after {attempts} attempts: {what}")]
    SearchExhausted { attempts: usize, what: &'static str },

    #[error("lift failed at stage {0}; this certifies a bug in the caller's exactness data")]
    LiftFailed(&'static str),

    #[error("exactness certificate failed at junction {junction}: {reason}")]
    NotExact { junction: usize, reason: String },

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
