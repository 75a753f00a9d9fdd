use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The two roots of the binding-constant quadratic coincide; the
    /// coefficient linear system is singular there.
    #[error("degenerate binding roots (|lambda1 - lambda2| = {gap:e}); nudge omega_rabi and retry")]
    DegenerateRoots { gap: f64 },

    #[error("{what}: quadrature did not converge (estimate {estimate:e}, error {achieved:e}, requested {requested:e})")]
    NoConvergence {
        what: &'static str,
        estimate: f64,
        achieved: f64,
        requested: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
