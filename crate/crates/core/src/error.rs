use thiserror::Error;

/// Errors raised by the special functions, trajectory solvers and density assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("({q0}, {theta}) lies outside the region where {what} is defined")]
    Region {
        what: &'static str,
        q0: f64,
        theta: f64,
    },

    #[error("fluctuation determinant vanishes (|Δ| = {0:e}); point lies on a caustic")]
    Caustic(f64),

    #[error("action branches disagree: closed form {closed} vs quadrature {quadrature}")]
    BranchInconsistency { closed: f64, quadrature: f64 },

    #[error("actions out of order: need I_gm <= I_lm <= I_sp, got ({gm}, {lm}, {sp})")]
    Ordering { gm: f64, lm: f64, sp: f64 },

    #[error("no effective potential matches the action difference {0}")]
    NoSolution(String),

    #[error("continuation failed at q0 = {last_q0} (last good turning point {last_qt})")]
    Continuation { last_q0: f64, last_qt: String },

    #[error("grid too small: boundary density {0:e} exceeds 1e-12")]
    GridTooSmall(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
