//! Error type shared by all modules of the crate.

/// Errors produced by quaternion, matrix and classification operations.
///
/// The variants split into three groups: bad input (`ZeroQuaternion`,
/// `SingularMatrix`, `NotUnitDeterminant`, `DomainError`, `UnknownFamily`),
/// verdicts that are errors only for the requested operation
/// (`NotReversible`, `NotDecomposable`, `NotAnEigenclass`, `CentralElement`)
/// and internal-consistency failures that signal numerical breakdown or an
/// implementation bug (`NonRealDeterminant`, `NonRealCoefficients`,
/// `ClusteringAmbiguity`, `NumericalBreakdown`, `InconsistentInvariants`,
/// `InternalInconsistency`).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quaternion with norm {norm:e} cannot be inverted")]
    ZeroQuaternion { norm: f64 },

    #[error("matrix is singular: det_H = {det:e}")]
    SingularMatrix { det: f64 },

    #[error("quaternionic determinant has imaginary residue {residue:e}; this signals a bug, not bad input")]
    NonRealDeterminant { residue: f64 },

    #[error("characteristic polynomial has imaginary residue {residue:e}; this signals a bug, not bad input")]
    NonRealCoefficients { residue: f64 },

    #[error("eigenvalues of the embedding cannot be paired into conjugate classes within {tol:e}")]
    ClusteringAmbiguity { tol: f64 },

    #[error("matrix is not in SL(2,H): det_H = {det} (tolerance {tol:e})")]
    NotUnitDeterminant { det: f64, tol: f64 },

    #[error("numerical breakdown: residual {residual:e} exceeds limit {limit:e}")]
    NumericalBreakdown { residual: f64, limit: f64 },

    #[error("(modulus {modulus}, angle {angle}) is not an eigenvalue class of this matrix")]
    NotAnEigenclass { modulus: f64, angle: f64 },

    #[error("parameter out of domain: {0}")]
    DomainError(String),

    #[error("no classification case matches c3 = {c3}, c2 = {c2}, c1 = {c1}")]
    InconsistentInvariants { c3: f64, c2: f64, c1: f64 },

    #[error("matrix is not reversible for sign {sign}")]
    NotReversible { sign: char },

    #[error("matrix admits no `{mode}` factorization")]
    NotDecomposable { mode: &'static str },

    #[error("matrix is central (+/-I): every point is fixed")]
    CentralElement,

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
