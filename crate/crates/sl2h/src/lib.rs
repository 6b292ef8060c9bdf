//! Algebra of 2x2 quaternionic matrices and their Moebius action on the
//! four-sphere, with conjugacy classification, reversibility analysis and
//! constructive involution factorizations.
//!
//! The crate is organized around [`QMatrix2`] and the complex embedding
//! `Phi`: determinants, characteristic polynomials and eigenvalue classes
//! all go through the embedding, and the higher layers (dynamical type,
//! algebraic classification, reversibility, Moebius geometry) are built on
//! those invariants. Every classification theorem has a matching runnable
//! check in [`verify`].

pub mod classify;
pub mod error;
pub mod moebius;
pub mod qmat;
pub mod quat;
pub mod report;
pub mod reversibility;
pub mod sample;
pub mod spectral;
pub mod verify;


pub use error::{Error, Result};

pub use qmat::{CMatrix4, CharPoly, QMatrix2};
pub use quat::{ClassRep, Quaternion};




/// Default tolerances. Arithmetic comparisons of unit-scale quantities use
/// [`tol::ARITHMETIC`]; spectral thresholding (rank decisions, class
/// clustering, classification predicates) uses the coarser
/// [`tol::SPECTRAL`], reflecting the accuracy actually attainable near
/// defective matrices.
pub mod tol {
    /// Absolute tolerance for unit-scale arithmetic checks.
    pub const ARITHMETIC: f64 = 1e-9;
    /// Threshold for rank decisions and classification predicates.
    pub const SPECTRAL: f64 = 1e-8;
    /// Witness residual above which normal-form extraction reports breakdown.
    pub const WITNESS_LIMIT: f64 = 1e-6;
    /// Floor for eigenvalue clustering: eigenvalues of a defective matrix
    /// carry O(sqrt(machine eps)) error, so clusters tighter than this are
    /// not resolvable in double precision.
    pub const CLUSTER_FLOOR: f64 = 1e-6;
}
