use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero modulo {0}")]
    DivisionByZero(u64),
    #[error("{0} is not a square modulo {1}")]
    NotASquare(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is not an odd prime")]
    UnsupportedModulus(u64),
    #[error("singular curve: 4A^3 + 27B^2 = 0")]
    SingularCurve,
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("p = {0} is unsupported: the short Weierstrass group law needs p >= 5")]
    UnsupportedPrime(u64),
    #[error("point does not lie on the curve")]
    InvalidPoint,
    #[error("x = {0} belongs to a 2-torsion point or to no curve point")]
    TwoTorsionX(u64),
    #[error("at least two data points are required")]
    InsufficientData,
    #[error("resultant involving the zero polynomial is undefined")]
    UndefinedResultant,
    #[error("p = {0} divides the leading coefficient")]
    LeadingCoefficientVanishes(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
