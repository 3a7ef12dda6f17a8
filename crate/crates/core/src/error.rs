use thiserror::Error;

use crate::spectrum::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} is outside the supported range 2 < p < 2^32")]
    ModulusOutOfRange(u64),

    #[error("series with zero constant term is not invertible")]
    SeriesNotInvertible,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("q-integer gamma_{index} vanishes in the base field")]
    GammaVanishes { index: usize },

    #[error("division by x^{shift} would discard the nonzero coefficient of degree {degree}")]
    NonzeroLowCoefficients { shift: usize, degree: usize },

    #[error("Sylvester equation has no unique solution (spectra intersect)")]
    SylvesterSingular,

    #[error("bad spectrum: {0}")]
    Spectrum(Violation),

    #[error("matrix is not diagonalizable over the base field: {0}")]
    NotDiagonalizable(&'static str),

    #[error("random generation gave up after {tries} attempts")]
    RetryBudgetExhausted { tries: usize },

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
