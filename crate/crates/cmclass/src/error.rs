//! Error type shared across the crate.

use num_bigint::BigInt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The defining polynomial factors over the rationals.
    #[error("polynomial is reducible; found factor {factor}")]
    ReduciblePolynomial { factor: String },

    /// Irreducibility could not be certified with the implemented methods.
    #[error("cannot certify irreducibility of {poly}")]
    IrreducibilityUndecided { poly: String },

    /// The field is not totally imaginary of the supported shape.
    #[error("not a CM field of supported shape: {0}")]
    NotCmField(String),

    /// CM machinery is implemented for degrees 2 and 4 only.
    #[error("unsupported degree {0} (supported: 2 and 4)")]
    UnsupportedDegree(usize),

    /// The CM type is induced from a proper CM subfield.
    #[error("CM type is imprimitive: {0}")]
    ImprimitiveType(String),

    /// A pairing that must be integral or unimodular is not.
    #[error("polarization defect: {0}")]
    PolarizationDefect(String),

    /// A matrix expected to be symplectic (up to multiplier) is not.
    #[error("matrix is not symplectic: {0}")]
    NotSymplectic(String),

    /// An ideal operation received incompatible or non-invertible input.
    #[error("ideal arithmetic error: {0}")]
    IdealArithmetic(String),

    /// A residue-class operation hit a non-invertible element.
    #[error("element not invertible modulo {modulus}")]
    NotInvertible { modulus: BigInt },

    /// A bounded search ran out of budget before reaching a conclusion.
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    /// Class group relations did not stabilize within the budget.
    #[error("class group computation inconclusive: {0}")]
    ClassGroupInconclusive(String),

    /// Numerical evaluation rejected its input.
    #[error("evaluation rejected: {0}")]
    Numerical(String),

    /// A theta product that must be balanced is not.
    #[error("theta product is not balanced (degree {0})")]
    UnbalancedProduct(i64),

    /// Recognition of an algebraic number from a float failed.
    #[error("recognition failed: {0}")]
    RecognitionFailed(String),

    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// Generic invalid-argument error with context.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
