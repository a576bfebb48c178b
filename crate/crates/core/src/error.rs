use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A problem instance that violates a model invariant.
    #[error("invalid problem: {0}")]
    Validation(String),
    /// A front vector outside the open ordered cone, or a point where a
    /// logarithm argument underflows.
    #[error("infeasible point: {0}")]
    Infeasible(String),
    #[error("line search failed: {0}")]
    LineSearch(String),
    /// The solver stopped without meeting the gradient tolerance.
    #[error("no convergence after {iterations} iterations (|grad|_inf = {grad_norm:e})")]
    NonConvergence { best: Vec<f64>, energy: f64, grad_norm: f64, iterations: usize },
    #[error("time step violates the stability bound: {0}")]
    Cfl(String),
    #[error("a front reached the simulation boundary: {0}")]
    FrontAtBoundary(String),
    #[error("no sign change on bracket: {0}")]
    NoSignChange(String),
    #[error("tail bound failure: {0}")]
    TailBound(String),
}
