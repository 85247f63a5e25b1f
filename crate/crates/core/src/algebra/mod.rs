//! Exact arithmetic over F₂[z] and F₂(z), and linear algebra over F₂(z).

mod exponent;
mod matrix;
mod poly;
mod rational;
mod text;

pub use exponent::{Exponent, MAX_BORROW_RUN};
pub use matrix::PolyMatrix;
pub use poly::{BinaryPoly, Degree, SPARSE_STEP_LIMIT};
pub use rational::Rational;
pub use text::DENSE_TEXT_LIMIT;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("exponent too large to materialise")]
    ExponentTooLarge,
    #[error("exponent subtraction underflow")]
    ExponentUnderflow,
    #[error("division leaves a nonzero remainder")]
    InexactDivision,
    #[error("sparse arithmetic exceeded its work limit")]
    WorkLimit,
    #[error("parse error: {0}")]
    Parse(String),
}
