use thiserror::Error;

use crate::quadrature::QuadResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("kernel rates differ: {left} vs {right}")]
    RateMismatch {
        left: num_complex::Complex64,
        right: num_complex::Complex64,
    },

    #[error("operation requires finite N; use the probe-limit path for N = inf")]
    InfiniteN,

    #[error("quadrature did not converge (value {}, estimated error {:.3e}, {} nodes)",
        .0.value, .0.err_estimate, .0.nodes_used)]
    NoConvergence(QuadResult),

    #[error("non-physical density matrix: eigenvalue {eigenvalue:.3e} below tolerance")]
    NonPhysicalState { eigenvalue: f64 },

    #[error("Majorana representation self-test failed: {0}")]
    Representation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
