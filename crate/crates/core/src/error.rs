use thiserror::Error;

use crate::spectral::PerronWeights;
use crate::verify::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arc ({from}, {to}) has an endpoint outside 0..{n}")]
    VertexOutOfRange { from: usize, to: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("regular tournament order must be odd, got {0}")]
    EvenOrder(usize),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input digraph is not a tournament")]
    NotATournament,

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Box<PerronWeights>,
    },

    #[error("repair budget exhausted with {} violating vertices", violations.len())]
    RepairBudgetExhausted { violations: Vec<Violation> },

    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
}
