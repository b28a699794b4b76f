use thiserror::Error;

/// Errors produced by constructors, primitives, and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The dispersion vanishes at gamma = 0, so the f-metric has no finite
    /// value there. Callers must guard the zero-SNR corner explicitly.
    #[error("singular input: gamma = 0 (dispersion is zero)")]
    SingularSnr,
    /// Power budget constraint violated at evaluation time.
    #[error("power budget violated: P1 + P2 = {used} exceeds P = {budget}")]
    PowerBudget { used: f64, budget: f64 },
    /// A bracket or iteration failed in a way the model says cannot happen.
    #[error("solver error: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
