use thiserror::Error;

/// Errors raised by the evaluators and checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid evaluation context: {0}")]
    InvalidContext(String),

    #[error(
        "quadrature did not converge on [{a}, {b}]: estimated error {abs_err:e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        abs_err: f64,
        subdivisions: usize,
    },

    #[error("unknown catalog function `{0}`")]
    CatalogMiss(String),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("invalid bracket: {0}")]
    BracketInvalid(String),

    #[error("bisection did not reach the requested width after {0} iterations")]
    NonConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
