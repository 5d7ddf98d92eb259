use alloc::format;
use alloc::string::String;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// The local ascent did not settle within the iteration budget while the
    /// feasibility decision depended on it.
    #[error("solver did not converge{}", non_convergence_detail(*position, *best_feasible))]
    NonConvergence {
        /// Position in the ordering, when solving as part of a table.
        position: Option<usize>,
        /// Smallest mean of a verified feasible distribution found so far.
        best_feasible: Option<f64>,
    },

    #[error("refusing to run: {required} exceeds the cap of {cap}")]
    CapExceeded { required: u128, cap: u128 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_position(self, k: usize) -> Self {
        match self {
            Error::NonConvergence { best_feasible, .. } => Error::NonConvergence {
                position: Some(k),
                best_feasible,
            },
            other => other,
        }
    }
}

fn non_convergence_detail(position: Option<usize>, best: Option<f64>) -> String {
    match (position, best) {
        (Some(k), Some(b)) => format!(" at position {k}; best feasible bound found {b}"),
        (Some(k), None) => format!(" at position {k}"),
        (None, Some(b)) => format!("; best feasible bound found {b}"),
        (None, None) => String::new(),
    }
}

pub type Result<T> = core::result::Result<T, Error>;
