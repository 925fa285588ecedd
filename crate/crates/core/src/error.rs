use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate {index} lies outside its domain")]
    OutOfRange { index: usize },
    #[error("moment vector lies on the boundary at level {index}")]
    Boundary { index: usize },
    #[error("not a moment vector: negative Hankel ratio at level {index}")]
    NotAMomentVector { index: usize },
    #[error("constraint cannot be met at index {index}")]
    Infeasible { index: usize },
    #[error("degenerate root of the denominator near {location}")]
    DegenerateRoot { location: f64 },
    #[error("point {x} is outside the open support")]
    OutsideSupport { x: f64 },
    #[error("constraint is not admissible")]
    NotAdmissible,
    #[error("potential {index} does not grow fast enough")]
    NonIntegrable { index: usize },
    #[error("minimizer is degenerate: {0}")]
    DegenerateMinimizer(String),
    #[error("chains did not converge (R-hat {rhat:.4})")]
    ChainNotConverged { rhat: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
