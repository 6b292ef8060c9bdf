//! The Moebius action of SL(2,H) on the four-sphere `H + infinity`.
//!
//! A matrix `(a b; c d)` acts by `z -> (a z + b)(c z + d)^-1`, with the
//! usual conventions at the pole and at infinity. Both lifts `A` and `-A`
//! induce the same transformation, exactly so in floating point, since every
//! sign flip cancels multiplicatively.
//!
//! Fixed points on the sphere are read off right eigenvectors: an
//! eigenvector `v = (v1, v2)` induces the fixed point `v1 v2^-1`, or
//! infinity when `v2` vanishes.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qmat::QMatrix2;
use crate::quat::Quaternion;
use crate::spectral::{class_eigenvectors, cluster_radius, eigenvalue_classes};

/// A point of the compactified quaternionic line `H + infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedQuaternion {
    Finite(Quaternion),
    Infinity,
}

impl ExtendedQuaternion {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedQuaternion::Infinity)
    }

    /// Equality within `tol`; infinity compares equal only to infinity.
    pub fn approx_eq(&self, other: &ExtendedQuaternion, tol: f64) -> bool {
        match (self, other) {
            (ExtendedQuaternion::Infinity, ExtendedQuaternion::Infinity) => true,
            (ExtendedQuaternion::Finite(p), ExtendedQuaternion::Finite(q)) => p.approx_eq(*q, tol),
            _ => false,
        }
    }
}

impl From<Quaternion> for ExtendedQuaternion {
    fn from(q: Quaternion) -> Self {
        ExtendedQuaternion::Finite(q)
    }
}

impl Serialize for ExtendedQuaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedQuaternion::Finite(q) => q.serialize(serializer),
            ExtendedQuaternion::Infinity => "inf".serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedQuaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Components([f64; 4]),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) if s == "inf" => Ok(ExtendedQuaternion::Infinity),
            Repr::Text(s) => Err(D::Error::custom(format!("expected \"inf\", got {s:?}"))),
            Repr::Components([w, x, y, z]) => {
                Ok(ExtendedQuaternion::Finite(Quaternion::new(w, x, y, z)))
            }
        }
    }
}

/// Applies the Moebius transformation of `A` to `z`.
///
/// Finite points with `|c z + d|` below `tol * (1 + |z|)` map to infinity;
/// infinity maps to `a c^-1`, or to itself when `c` vanishes. `A` may be
/// any invertible matrix (the action only depends on its projective class).
pub fn apply_moebius(
    a: &QMatrix2,
    z: &ExtendedQuaternion,
    tol: f64,
) -> Result<ExtendedQuaternion> {
    let det = a.det_h()?;
    if det <= tol {
        return Err(Error::SingularMatrix { det });
    }
    match z {
        ExtendedQuaternion::Finite(q) => {
            let denom = a.c * *q + a.d;
            if denom.norm() <= tol * (1.0 + q.norm()) {
                return Ok(ExtendedQuaternion::Infinity);
            }
            let numer = a.a * *q + a.b;
            Ok(ExtendedQuaternion::Finite(numer * denom.inverse()?))
        }
        ExtendedQuaternion::Infinity => {
            if a.c.norm() > tol {
                Ok(ExtendedQuaternion::Finite(a.a * a.c.inverse()?))
            } else {
                Ok(ExtendedQuaternion::Infinity)
            }
        }
    }
}

/// Boundary fixed points of the transformation, one per right eigenvector,
/// deduplicated. Hyperbolic elements have exactly two, parabolic exactly
/// one; for elliptic elements the eigenvector-induced sphere points are
/// returned (the interior fixed-point geometry is not modeled).
///
/// Fails with [`Error::CentralElement`] for `A = +-I`, where every point is
/// fixed.
pub fn fixed_points(a: &QMatrix2, tol: f64) -> Result<Vec<ExtendedQuaternion>> {
    let spectral_tol = tol.max(crate::tol::SPECTRAL);
    a.require_unit_det(spectral_tol)?;
    let id = QMatrix2::identity();
    if a.approx_eq(&id, spectral_tol) || a.approx_eq(&-id, spectral_tol) {
        return Err(Error::CentralElement);
    }
    let spectrum = eigenvalue_classes(a, spectral_tol)?;
    let scale = spectrum.classes.iter().map(|c| c.class.modulus).fold(1.0f64, f64::max);
    let vanish = cluster_radius(tol, scale);
    let mut points: Vec<ExtendedQuaternion> = Vec::new();
    for sc in &spectrum.classes {
        let vectors =
            class_eigenvectors(a, sc.class.as_complex(), sc.multiplicity, spectral_tol)?;
        for (v1, v2) in vectors {
            let p = if v2.norm() <= vanish {
                ExtendedQuaternion::Infinity
            } else {
                ExtendedQuaternion::Finite(v1 * v2.inverse()?)
            };
            if !points.iter().any(|q| q.approx_eq(&p, spectral_tol.max(1e-7))) {
                points.push(p);
            }
        }
    }
    // every reported point must actually be fixed
    for p in &points {
        let image = apply_moebius(a, p, tol.min(1e-9))?;
        let limit = match p {
            ExtendedQuaternion::Finite(q) => {
                crate::tol::WITNESS_LIMIT * (1.0 + q.norm_sqr())
            }
            ExtendedQuaternion::Infinity => 0.0,
        };
        let ok = match (p, &image) {
            (ExtendedQuaternion::Infinity, _) => image.is_infinity(),
            (ExtendedQuaternion::Finite(q), ExtendedQuaternion::Finite(iq)) => {
                (*q - *iq).norm() <= limit
            }
            _ => false,
        };
        if !ok {
            return Err(Error::NumericalBreakdown { residual: f64::NAN, limit });
        }
    }
    Ok(points)
}
