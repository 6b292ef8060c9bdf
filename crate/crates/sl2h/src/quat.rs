//! Hamilton quaternions and their similarity classes.
//!
//! A quaternion `q = w + x i + y j + z k` is stored by its four real
//! components. Throughout the crate a quaternion is split into two complex
//! numbers as `q = z1 + z2 j` with `z1 = w + x i` and `z2 = y + z i`; every
//! module relies on this one convention, so it is defined (and tested) here
//! once.
//!
//! Two quaternions are *similar* when they lie in the same conjugation orbit
//! `{ u q u^-1 }`. Each orbit contains a unique complex number with
//! non-negative imaginary part, represented by [`ClassRep`] as a
//! (modulus, angle) pair with angle in `[0, pi]`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of the real division algebra of Hamilton quaternions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);
pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn from_real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds `c = a + b i` as the quaternion `a + b i`.
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// `e^{i theta}` as a quaternion.
    pub fn unit_complex(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin(), 0.0, 0.0)
    }

    /// The complex split `q = z1 + z2 j` with `z1 = w + x i`, `z2 = y + z i`.
    pub fn complex_parts(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    /// Rebuilds a quaternion from its complex split.
    pub fn from_complex_parts(z1: Complex64, z2: Complex64) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Norm of the imaginary part `x i + y j + z k`.
    pub fn imag_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// True when the `j` and `k` components vanish within `tol`.
    pub fn is_complex(self, tol: f64) -> bool {
        self.y.abs() <= tol && self.z.abs() <= tol
    }

    /// Multiplicative inverse `conjugate(q) / |q|^2`.
    ///
    /// Fails with [`Error::ZeroQuaternion`] when the norm is below `1e-12`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.sqrt() <= 1e-12 {
            return Err(Error::ZeroQuaternion { norm: n2.sqrt() });
        }
        Ok(self.conjugate() / n2)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// The unique complex representative of the similarity class of `q`.
    ///
    /// A real negative quaternion maps to angle `pi` with zero imaginary
    /// magnitude, so angles always land in `[0, pi]`.
    pub fn class_rep(self) -> ClassRep {
        ClassRep {
            modulus: self.norm(),
            angle: self.imag_norm().atan2(self.w),
        }
    }

    /// True when `p` and `q` lie in the same similarity class within `tol`,
    /// comparing (modulus, angle) coordinate-wise.
    pub fn is_similar_to(self, other: Quaternion, tol: f64) -> bool {
        self.class_rep().approx_eq(other.class_rep(), tol)
    }

    /// Component-wise comparison within `tol`.
    pub fn approx_eq(self, other: Quaternion, tol: f64) -> bool {
        (self - other).max_abs_component() <= tol
    }

    /// Largest absolute component; the `l_inf` norm on coordinates.
    pub fn max_abs_component(self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product; non-commutative.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.w, self.x, self.y, self.z].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [w, x, y, z] = <[f64; 4]>::deserialize(deserializer)?;
        Ok(Self::new(w, x, y, z))
    }
}

/// The unique complex representative `modulus * e^{i angle}` of a quaternion
/// similarity class, with `angle` in `[0, pi]`.
///
/// Two quaternions are similar exactly when their class representatives
/// coincide, so equality of `ClassRep`s (within tolerance) *is* the
/// similarity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRep {
    pub modulus: f64,
    pub angle: f64,
}

impl ClassRep {
    pub fn new(modulus: f64, angle: f64) -> Self {
        debug_assert!(modulus >= 0.0, "class modulus must be non-negative");
        debug_assert!((-1e-12..=std::f64::consts::PI + 1e-12).contains(&angle));
        Self { modulus, angle }
    }

    /// Class of an arbitrary complex number: the representative with
    /// non-negative imaginary part.
    pub fn from_complex(c: Complex64) -> Self {
        Self {
            modulus: c.norm(),
            angle: c.im.abs().atan2(c.re),
        }
    }

    /// The representative as a complex number `r e^{i theta}`.
    pub fn as_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.angle)
    }

    /// The representative as a quaternion with zero `j`, `k` parts.
    pub fn as_quaternion(self) -> Quaternion {
        Quaternion::from_complex(self.as_complex())
    }

    pub fn approx_eq(self, other: ClassRep, tol: f64) -> bool {
        // Angles of near-zero quaternions are meaningless; compare the
        // represented complex numbers instead of raw coordinates there.
        (self.modulus - other.modulus).abs() <= tol
            && ((self.angle - other.angle).abs() <= tol
                || (self.as_complex() - other.as_complex()).norm() <= tol)
    }

    /// Class of the inverse: modulus reciprocated, angle unchanged.
    pub fn inverse(self) -> Result<ClassRep> {
        if self.modulus <= 1e-12 {
            return Err(Error::ZeroQuaternion { norm: self.modulus });
        }
        Ok(Self { modulus: 1.0 / self.modulus, angle: self.angle })
    }

    /// Class of the negated inverse: modulus reciprocated, angle reflected
    /// through `pi/2`.
    pub fn neg_inverse(self) -> Result<ClassRep> {
        let inv = self.inverse()?;
        Ok(Self { modulus: inv.modulus, angle: std::f64::consts::PI - inv.angle })
    }

    /// True when the angle is within `tol` of `0` or `pi`, i.e. the class is
    /// that of a real number.
    pub fn is_real(self, tol: f64) -> bool {
        self.angle.abs() <= tol || (std::f64::consts::PI - self.angle).abs() <= tol
    }
}
