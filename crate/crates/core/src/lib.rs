//! Exact symbolic engine for formal FQ operations: truncated noncommutative power series
//! around a rank-two Clifford system `(Q₁, Q₂)`.

pub mod bases;
pub mod calculus;
pub mod coeff;
pub mod fqop;
pub mod golden;
pub mod invariance;
pub mod linsolve;
pub mod ncalgebra;
pub mod rational;
pub mod word;

pub use bases::{BasisTag, CharGroup, Derivation};
pub use coeff::{Coeff, Poly, Var};
pub use fqop::{builtin, Builtin, FQOperation, FirstDifferential, OperationKind};
pub use invariance::PropertySpec;
pub use ncalgebra::{AlgebraElement, CliffordPart};
pub use rational::Rational;
pub use word::Word;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("basis mismatch: {0} vs {1}")]
    BasisMismatch(BasisTag, BasisTag),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expression does not satisfy the kind's sign-linear form: {0}")]
    Kind(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("AFP violated: {0}")]
    Afp(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
}
