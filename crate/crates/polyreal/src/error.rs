//! Library error type.

/// Errors raised by validators, solvers and conversions.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular or ill-conditioned (rcond {rcond:.3e})")]
    SingularMatrix { rcond: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("not a decomposition of the identity: {0}")]
    NotDecomposition(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point outside the function domain: {0}")]
    OutsideDomain(String),
    #[error("Cayley transform pole: a component equals 1")]
    PoleAtOne,
    #[error("Cayley transform pole: a component equals -1")]
    PoleAtMinusOne,
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("unitary matrix has an eigenvalue within {tol:.3e} of 1")]
    EigenvalueOne { tol: f64 },
    #[error("I - D is singular (rcond {rcond:.3e})")]
    SingularIminusD { rcond: f64 },
    #[error("matrix is not skew-adjoint (deviation {deviation:.3e})")]
    NotSkewAdjoint { deviation: f64 },
    #[error("pencil 22-block is singular (rcond {rcond:.3e})")]
    SingularBlock { rcond: f64 },
    #[error("operation requires a scalar function (q = 1), got q = {q}")]
    NotScalar { q: usize },
    #[error("sample Gram identity violated (residual {residual:.3e} > {tol:.3e})")]
    GramMismatch { residual: f64, tol: f64 },
    #[error("point pair outside the domain of the requested kernel flavor: {0}")]
    DomainMismatch(String),
    #[error("wrong commuting-tuple kind: expected {expected}")]
    WrongTupleKind { expected: &'static str },
    #[error("Taylor degree too small: tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    DegreeTooSmall { bound: f64, tol: f64 },
    #[error("state operator is not dissipative (max eigenvalue of A + A* is {max_eig:.3e})")]
    NotDissipative { max_eig: f64 },
    #[error("invalid colligation: {0}")]
    InvalidColligation(String),
    #[error("invalid pencil: {0}")]
    InvalidPencil(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("non-finite entries in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
