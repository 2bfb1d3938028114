use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated state space could not hold the requested computation.
    /// `tail` is the probability mass left unaccounted for.
    #[error("capacity error in {module}: {detail} (unaccounted tail {tail:.3e})")]
    Capacity {
        module: &'static str,
        detail: String,
        tail: f64,
    },

    /// A numerical scheme failed to reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// The operation requires a different component state (e.g. an active memory).
    #[error("state error: {0}")]
    State(String),

    /// The requested inversion has no solution in the physical range.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// The requested quantity is undefined for these inputs.
    #[error("undefined: {0}")]
    Undefined(String),

    /// Least-squares fitting failed to converge.
    #[error("fit did not converge after {iterations} iterations (ssr {ssr:.6e}, last step {last_step:.3e})")]
    FitDidNotConverge {
        iterations: usize,
        ssr: f64,
        last_step: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn require_nonnegative(name: &str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must be >= 0, got {value}")))
    }
}

pub(crate) fn require_in_unit(name: &str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {value}")))
    }
}
