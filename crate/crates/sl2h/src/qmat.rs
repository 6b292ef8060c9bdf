//! 2x2 quaternionic matrices and their complex embedding.
//!
//! A matrix `A` over the quaternions splits entry-wise as `A = A1 + A2 j`
//! with `A1`, `A2` complex 2x2 matrices; the embedding into 4x4 complex
//! matrices is
//!
//! ```text
//! Phi(A) = ( A1         A2        )
//!          ( -conj(A2)  conj(A1)  )
//! ```
//!
//! The quaternionic determinant `det_H(A)` is `det(Phi(A))` (always real and
//! non-negative), and the quaternionic characteristic polynomial is the one
//! of `Phi(A)`:
//!
//! ```text
//! x^4 - c3 x^3 + c2 x^2 - c1 x + c0
//! ```
//!
//! whose coefficients are real and conjugation-invariant. For unit
//! determinant `c0 = 1`, and `(c1, c2, c3)` are the invariants the
//! classification and reversibility modules work with.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quat::{self, Quaternion};

type CMat2 = Matrix2<Complex64>;
type CMat4 = Matrix4<Complex64>;

/// Relative imaginary residue above which a "real" quantity is treated as an
/// implementation bug rather than rounding noise.
const REAL_RESIDUE_TOL: f64 = 1e-9;

/// A 2x2 matrix over the quaternions, row-major: `(a b; c d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QMatrix2 {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl QMatrix2 {
    pub const fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::diagonal(quat::ONE, quat::ONE)
    }

    pub fn diagonal(p: Quaternion, q: Quaternion) -> Self {
        Self::new(p, quat::ZERO, quat::ZERO, q)
    }

    pub fn anti_diagonal(p: Quaternion, q: Quaternion) -> Self {
        Self::new(quat::ZERO, p, q, quat::ZERO)
    }

    /// The upper-triangular block `(e^{i theta} 1; 0 e^{i theta})`.
    pub fn parabolic(theta: f64) -> Self {
        let l = Quaternion::unit_complex(theta);
        Self::new(l, quat::ONE, quat::ZERO, l)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a.scale(s), self.b.scale(s), self.c.scale(s), self.d.scale(s))
    }

    /// Largest quaternion norm among the entries of `self - other`.
    pub fn distance_inf(&self, other: &QMatrix2) -> f64 {
        (*self - *other).norm_inf()
    }

    pub fn approx_eq(&self, other: &QMatrix2, tol: f64) -> bool {
        self.distance_inf(other) <= tol
    }

    /// Largest entry norm.
    pub fn norm_inf(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// The complex embedding of `self`.
    pub fn phi(&self) -> CMatrix4 {
        CMatrix4(self.phi_matrix())
    }

    pub(crate) fn phi_matrix(&self) -> CMat4 {
        let (a1, a2) = self.complex_split();
        let mut m = CMat4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a1);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&a2);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-a2.conjugate()));
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&a1.conjugate());
        m
    }

    /// Entry-wise complex split `A = A1 + A2 j`.
    pub(crate) fn complex_split(&self) -> (CMat2, CMat2) {
        let (a1, a2) = self.a.complex_parts();
        let (b1, b2) = self.b.complex_parts();
        let (c1, c2) = self.c.complex_parts();
        let (d1, d2) = self.d.complex_parts();
        (CMat2::new(a1, b1, c1, d1), CMat2::new(a2, b2, c2, d2))
    }

    pub(crate) fn from_complex_split(a1: &CMat2, a2: &CMat2) -> Self {
        Self::new(
            Quaternion::from_complex_parts(a1[(0, 0)], a2[(0, 0)]),
            Quaternion::from_complex_parts(a1[(0, 1)], a2[(0, 1)]),
            Quaternion::from_complex_parts(a1[(1, 0)], a2[(1, 0)]),
            Quaternion::from_complex_parts(a1[(1, 1)], a2[(1, 1)]),
        )
    }

    /// Quaternionic (Study) determinant `det(Phi(A))`.
    ///
    /// The value is mathematically real and non-negative; a significant
    /// imaginary residue or a significantly negative value signals a bug.
    pub fn det_h(&self) -> Result<f64> {
        let det = self.phi_matrix().determinant();
        let scale = 1.0 + self.norm_inf().powi(4);
        if det.im.abs() > REAL_RESIDUE_TOL * scale {
            return Err(Error::NonRealDeterminant { residue: det.im.abs() });
        }
        if det.re < -REAL_RESIDUE_TOL * scale {
            return Err(Error::InternalInconsistency(format!(
                "Study determinant is negative: {}",
                det.re
            )));
        }
        Ok(det.re)
    }

    /// Inverse computed by inverting `Phi(A)` and mapping back through the
    /// block structure. Avoids the pitfalls of non-commutative adjugate
    /// formulas.
    pub fn inverse(&self) -> Result<QMatrix2> {
        let det = self.det_h()?;
        let scale = 1.0 + self.norm_inf().powi(4);
        if det <= 1e-12 * scale {
            return Err(Error::SingularMatrix { det });
        }
        let m = self.phi_matrix();
        let minv = m
            .try_inverse()
            .ok_or(Error::SingularMatrix { det })?;
        let b1 = minv.fixed_view::<2, 2>(0, 0).into_owned();
        let b2 = minv.fixed_view::<2, 2>(0, 2).into_owned();
        // The inverse of a quaternionically structured matrix is structured;
        // a broken bottom half means the arithmetic went wrong.
        let bottom_left = minv.fixed_view::<2, 2>(2, 0).into_owned();
        let bottom_right = minv.fixed_view::<2, 2>(2, 2).into_owned();
        let residue = (bottom_left + b2.conjugate()).norm() + (bottom_right - b1.conjugate()).norm();
        if residue > 1e-7 * (1.0 + minv.norm()) {
            return Err(Error::InternalInconsistency(format!(
                "inverse lost the quaternionic block structure (residue {residue:e})"
            )));
        }
        Ok(Self::from_complex_split(&b1, &b2))
    }

    /// `S A S^-1`.
    pub fn conjugate_by(&self, s: &QMatrix2) -> Result<QMatrix2> {
        Ok(*s * *self * s.inverse()?)
    }

    /// Coefficients of the characteristic polynomial of `Phi(A)`, computed
    /// from traces of powers (Newton's identities). An independent route via
    /// the eigenvalues of the embedding is provided by
    /// [`QMatrix2::char_poly_from_eigenvalues`].
    pub fn char_poly(&self) -> Result<CharPoly> {
        let m = self.phi_matrix();
        let m2 = m * m;
        let m3 = m2 * m;
        let m4 = m3 * m;
        let t1 = m.trace();
        let t2 = m2.trace();
        let t3 = m3.trace();
        let t4 = m4.trace();
        let e1 = t1;
        let e2 = (e1 * t1 - t2) / 2.0;
        let e3 = (e2 * t1 - e1 * t2 + t3) / 3.0;
        let e4 = (e3 * t1 - e2 * t2 + e1 * t3 - t4) / 4.0;
        self.realize_coefficients([e1, e2, e3, e4])
    }

    /// The same coefficients recovered from the eigenvalues of `Phi(A)` via
    /// elementary symmetric functions. Used to cross-check [`Self::char_poly`].
    pub fn char_poly_from_eigenvalues(&self) -> Result<CharPoly> {
        let l = self.phi().eigenvalues()?;
        let e1 = l[0] + l[1] + l[2] + l[3];
        let e2 = l[0] * l[1] + l[0] * l[2] + l[0] * l[3] + l[1] * l[2] + l[1] * l[3] + l[2] * l[3];
        let e3 = l[0] * l[1] * l[2] + l[0] * l[1] * l[3] + l[0] * l[2] * l[3] + l[1] * l[2] * l[3];
        let e4 = l[0] * l[1] * l[2] * l[3];
        self.realize_coefficients([e1, e2, e3, e4])
    }

    fn realize_coefficients(&self, e: [Complex64; 4]) -> Result<CharPoly> {
        let nf = 1.0 + self.norm_inf();
        for (k, coeff) in e.iter().enumerate() {
            let scale = nf.powi(k as i32 + 1);
            if coeff.im.abs() > REAL_RESIDUE_TOL * scale {
                return Err(Error::NonRealCoefficients { residue: coeff.im.abs() });
            }
        }
        Ok(CharPoly { c3: e[0].re, c2: e[1].re, c1: e[2].re, c0: e[3].re })
    }

    /// Rescales `A` by `det_H(A)^{-1/4}` so the result has unit quaternionic
    /// determinant.
    pub fn sl_normalize(&self) -> Result<QMatrix2> {
        let det = self.det_h()?;
        let scale = 1.0 + self.norm_inf().powi(4);
        if det <= 1e-12 * scale {
            return Err(Error::SingularMatrix { det });
        }
        Ok(self.scale(det.powf(-0.25)))
    }

    /// Checks `|det_H(A) - 1| <= tol`, the SL(2,H) membership test used as a
    /// precondition throughout the crate.
    pub fn require_unit_det(&self, tol: f64) -> Result<f64> {
        let det = self.det_h()?;
        if (det - 1.0).abs() > tol {
            return Err(Error::NotUnitDeterminant { det, tol });
        }
        Ok(det)
    }
}

impl Mul for QMatrix2 {
    type Output = QMatrix2;
    /// Matrix product with entry-wise Hamilton products; order matters.
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl Add for QMatrix2 {
    type Output = QMatrix2;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl Sub for QMatrix2 {
    type Output = QMatrix2;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

impl Neg for QMatrix2 {
    type Output = QMatrix2;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// A 4x4 complex matrix, produced by the embedding of a [`QMatrix2`].
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix4(pub(crate) CMat4);

impl CMatrix4 {
    pub fn from_matrix(m: CMat4) -> Self {
        Self(m)
    }

    pub fn as_matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.determinant()
    }

    /// How far the matrix is from the quaternionic block form
    /// `(A1 A2; -conj(A2) conj(A1))`; zero for every embedded matrix.
    pub fn block_structure_residual(&self) -> f64 {
        let a1 = self.0.fixed_view::<2, 2>(0, 0).into_owned();
        let a2 = self.0.fixed_view::<2, 2>(0, 2).into_owned();
        let bl = self.0.fixed_view::<2, 2>(2, 0).into_owned();
        let br = self.0.fixed_view::<2, 2>(2, 2).into_owned();
        ((bl + a2.conjugate()).norm().powi(2) + (br - a1.conjugate()).norm().powi(2)).sqrt()
    }

    /// Recovers the quaternionic matrix, failing when the block structure is
    /// broken beyond `tol`.
    pub fn to_qmatrix(&self, tol: f64) -> Result<QMatrix2> {
        let residue = self.block_structure_residual();
        if residue > tol {
            return Err(Error::InternalInconsistency(format!(
                "matrix is not quaternionically structured (residue {residue:e})"
            )));
        }
        let a1 = self.0.fixed_view::<2, 2>(0, 0).into_owned();
        let a2 = self.0.fixed_view::<2, 2>(0, 2).into_owned();
        Ok(QMatrix2::from_complex_split(&a1, &a2))
    }

    /// The four eigenvalues, in no particular order.
    ///
    /// Uses a complex Schur decomposition; on the (rare) failure of the
    /// iteration the roots of the trace-derived characteristic polynomial
    /// are used as a fallback.
    pub fn eigenvalues(&self) -> Result<[Complex64; 4]> {
        for (eps, max_iter) in [(1e-14, 400), (1e-12, 2000)] {
            if let Some(schur) = nalgebra::linalg::Schur::try_new(self.0, eps, max_iter) {
                if let Some(ev) = schur.eigenvalues() {
                    return Ok([ev[0], ev[1], ev[2], ev[3]]);
                }
            }
        }
        let q = self.to_qmatrix(1e-6)?;
        Ok(q.char_poly()?.roots())
    }
}

impl Mul for &CMatrix4 {
    type Output = CMatrix4;
    fn mul(self, rhs: Self) -> CMatrix4 {
        CMatrix4(self.0 * rhs.0)
    }
}

/// Real coefficients of `x^4 - c3 x^3 + c2 x^2 - c1 x + c0`, the
/// characteristic polynomial of the embedded matrix. They are conjugacy
/// invariants; for SL(2,H) elements `c0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CharPoly {
    pub fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c2, c1, c0 }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        (((x - self.c3) * x + self.c2) * x - self.c1) * x + self.c0
    }

    pub fn approx_eq(&self, other: &CharPoly, tol: f64) -> bool {
        (self.c3 - other.c3).abs() <= tol
            && (self.c2 - other.c2).abs() <= tol
            && (self.c1 - other.c1).abs() <= tol
            && (self.c0 - other.c0).abs() <= tol
    }

    pub fn max_abs_diff(&self, other: &CharPoly) -> f64 {
        (self.c3 - other.c3)
            .abs()
            .max((self.c2 - other.c2).abs())
            .max((self.c1 - other.c1).abs())
            .max((self.c0 - other.c0).abs())
    }

    /// Factors the quartic into two real quadratics `x^2 - s x + p`.
    ///
    /// Characteristic polynomials of embedded matrices always factor this
    /// way (each eigenvalue class contributes one conjugate pair), so the
    /// factorization is computed structurally: a perfect-square test handles
    /// the doubled-class case exactly, and otherwise the largest real root
    /// of the resolvent cubic `u = p1 + p2` splits the factors. Closed-form
    /// plus Newton polish; no iterative eigensolver is involved, so multiple
    /// roots cannot stall and the doubled-class case stays well-conditioned.
    pub fn quadratic_factors(&self) -> [(f64, f64); 2] {
        let (c3, c2, c1, c0) = (self.c3, self.c2, self.c1, self.c0);
        let scale = 1.0 + c2.abs() + c3 * c3 + c0.abs();

        // perfect square (x^2 - s x + p)^2: doubled class
        let s = c3 / 2.0;
        let p = c0.max(0.0).sqrt();
        let square_residual = (c2 - (s * s + 2.0 * p)).abs().max((c1 - 2.0 * s * p).abs());
        if square_residual <= 1e-9 * scale {
            return [(s, p), (s, p)];
        }

        // resolvent cubic for u = p1 + p2:
        // u^3 - c2 u^2 + (c1 c3 - 4 c0) u + (4 c0 c2 - c0 c3^2 - c1^2) = 0
        let u = largest_real_cubic_root(
            -c2,
            c1 * c3 - 4.0 * c0,
            4.0 * c0 * c2 - c0 * c3 * c3 - c1 * c1,
        );
        let half_gap = (u * u / 4.0 - c0).max(0.0).sqrt();
        let (p1, p2) = (u / 2.0 + half_gap, u / 2.0 - half_gap);
        if (p1 - p2).abs() > 1e-4 * (1.0 + u.abs()) {
            // distinct moduli: s2 from the cross equation s1 p2 + s2 p1 = c1
            let s2 = (c1 - c3 * p2) / (p1 - p2);
            let s1 = c3 - s2;
            [(s1, p1), (s2, p2)]
        } else {
            // equal moduli: recover s1, s2 from sum and product
            let sigma = c2 - u;
            let d = (c3 * c3 / 4.0 - sigma).max(0.0).sqrt();
            let (s1, s2) = (c3 / 2.0 + d, c3 / 2.0 - d);
            // pick the pairing that satisfies the cross equation best
            let straight = (s1 * p2 + s2 * p1 - c1).abs();
            let crossed = (s1 * p1 + s2 * p2 - c1).abs();
            if straight <= crossed {
                [(s1, p1), (s2, p2)]
            } else {
                [(s1, p2), (s2, p1)]
            }
        }
    }

    /// The four roots; complex roots come in exact conjugate pairs since
    /// they are assembled from the real quadratic factors.
    pub fn roots(&self) -> [Complex64; 4] {
        let mut out = [Complex64::default(); 4];
        for (k, (s, p)) in self.quadratic_factors().into_iter().enumerate() {
            let disc = s * s / 4.0 - p;
            let (r1, r2) = if disc >= 0.0 {
                let d = disc.sqrt();
                (Complex64::new(s / 2.0 + d, 0.0), Complex64::new(s / 2.0 - d, 0.0))
            } else {
                let d = (-disc).sqrt();
                (Complex64::new(s / 2.0, d), Complex64::new(s / 2.0, -d))
            };
            out[2 * k] = r1;
            out[2 * k + 1] = r2;
        }
        out
    }
}

/// Largest real root of `u^3 + a u^2 + b u + c`, by the trigonometric /
/// Cardano closed forms plus two Newton polishing steps.
fn largest_real_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let scale = (a.abs() + b.abs().sqrt() + c.abs().cbrt()).max(1.0);
    let t = if p.abs() < 1e-14 * scale * scale {
        (-q).cbrt()
    } else {
        let discriminant = -4.0 * p * p * p - 27.0 * q * q;
        if discriminant >= 0.0 {
            // three real roots; k = 0 is the largest
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            m * (arg.acos() / 3.0).cos()
        } else {
            let d = (q * q / 4.0 + p * p * p / 27.0).sqrt();
            (-q / 2.0 + d).cbrt() + (-q / 2.0 - d).cbrt()
        }
    };
    let mut u = t - a / 3.0;
    for _ in 0..2 {
        let f = ((u + a) * u + b) * u + c;
        let df = (3.0 * u + 2.0 * a) * u + b;
        if df.abs() > 1e-300 {
            u -= f / df;
        }
    }
    u
}
