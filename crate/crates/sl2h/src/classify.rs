//! Dynamical types and the coefficient-based algebraic classification.
//!
//! An element of PSL(2,H) is hyperbolic when some eigenvalue class has
//! non-unit modulus, elliptic when it is diagonalizable with all classes on
//! the unit circle, and parabolic otherwise. The finer classification into
//! eight conjugacy families reads off the characteristic-polynomial
//! coefficients `(c1, c2, c3)` alone, except for one genuinely spectral bit:
//! on the surface `c2 = c1^2/4 + 2` a diagonalizability flag separates the
//! parabolic family from its diagonalizable twins.
//!
//! For the diagonal representative `diag(r e^{i theta}, r^-1 e^{i phi})` the
//! coefficients satisfy closed-form identities,
//!
//! ```text
//! c3 = 2 (r cos(theta) + r^-1 cos(phi))
//! c2 = 4 cos(theta) cos(phi) + r^2 + r^-2
//! c1 = 2 (r^-1 cos(theta) + r cos(phi))
//! ```
//!
//! implemented by [`coeff_identities`] and cross-checked against the
//! embedding route in the verification suite.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmat::{CharPoly, QMatrix2};
use crate::spectral::{eigenvalue_classes, is_diagonalizable};

/// Mutually exclusive dynamical classes of a quaternionic Moebius
/// transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DynamicalType {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Determines the dynamical type from the eigenvalue classes.
pub fn dynamical_type(a: &QMatrix2, tol: f64) -> Result<DynamicalType> {
    a.require_unit_det(tol.max(crate::tol::SPECTRAL))?;
    let spectrum = eigenvalue_classes(a, tol)?;
    if spectrum.classes.iter().any(|c| (c.class.modulus - 1.0).abs() > tol) {
        return Ok(DynamicalType::Hyperbolic);
    }
    if is_diagonalizable(a, tol) {
        Ok(DynamicalType::Elliptic)
    } else {
        Ok(DynamicalType::Parabolic)
    }
}

/// Closed-form characteristic-polynomial coefficients of
/// `diag(r e^{i theta}, r^-1 e^{i phi})`.
pub fn coeff_identities(r: f64, theta: f64, phi: f64) -> Result<CharPoly> {
    if !(r > 0.0) {
        return Err(Error::DomainError(format!("r must be positive, got {r}")));
    }
    let range = -1e-12..=PI + 1e-12;
    if !range.contains(&theta) || !range.contains(&phi) {
        return Err(Error::DomainError(format!(
            "angles must lie in [0, pi], got theta = {theta}, phi = {phi}"
        )));
    }
    let (ct, cp) = (theta.cos(), phi.cos());
    Ok(CharPoly {
        c3: 2.0 * (r * ct + cp / r),
        c2: 4.0 * ct * cp + r * r + 1.0 / (r * r),
        c1: 2.0 * (ct / r + r * cp),
        c0: 1.0,
    })
}

/// Sub-case boundary markers attached to an [`AlgebraicClass`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryFlag {
    /// The rotation angle theta lies in `{0, pi}` (within tolerance).
    ThetaAxis,
    /// The rotation angle theta equals `pi/2` (within tolerance).
    ThetaHalfPi,
}

/// One of the eight conjugacy families, with the realized normal-form
/// parameters and boundary markers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicClass {
    pub case_id: u8,
    /// Human-readable template of the conjugacy representative.
    pub representative: String,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub boundary_flags: Vec<BoundaryFlag>,
}

const TEMPLATES: [&str; 8] = [
    "diag(r e^{i theta}, r^-1 e^{i phi}), r != 1, theta != phi, theta != pi - phi",
    "diag(r e^{i theta}, r^-1 e^{i (pi - theta)}), r != 1, theta != pi/2",
    "diag(r i, r^-1 i), r != 1",
    "diag(r e^{i theta}, r^-1 e^{i theta}), r != 1, theta != pi/2",
    "diag(e^{i theta}, e^{i phi}), theta != phi, theta != pi - phi",
    "diag(e^{i theta}, e^{i theta}), theta != pi/2",
    "diag(e^{i theta}, e^{i (pi - theta)})",
    "(e^{i theta} 1; 0 e^{i theta})",
];

/// Evaluates the eight-case classification table in a fixed order.
///
/// The `diagonalizable` flag is consulted only on the parabola
/// `c2 = c1^2/4 + 2` with `|c1| <= 4`, where coefficients alone cannot
/// separate the parabolic family (case 8) from the diagonalizable families
/// on the same surface. All threshold comparisons use the single tolerance
/// `tol` on coefficient space.
pub fn algebraic_class(cp: &CharPoly, diagonalizable: bool, tol: f64) -> Result<AlgebraicClass> {
    if (cp.c0 - 1.0).abs() > tol {
        return Err(Error::NotUnitDeterminant { det: cp.c0, tol });
    }
    let (c1, c2, c3) = (cp.c1, cp.c2, cp.c3);
    let diff = c1 - c3;
    let sum = c1 + c3;
    let inconsistent = || Error::InconsistentInvariants { c3, c2, c1 };

    let (case_id, flags) = if diff.abs() > tol && sum.abs() > tol {
        // c1^2 != c3^2: the one non-reversible family
        (1, vec![])
    } else if c1.abs() <= tol && c3.abs() <= tol {
        if c2 > 2.0 + tol {
            (3, vec![])
        } else if c2 >= -2.0 - tol {
            if (c2 - 2.0).abs() <= tol && !diagonalizable {
                (8, vec![BoundaryFlag::ThetaHalfPi])
            } else {
                let mut flags = vec![];
                if (c2 + 2.0).abs() <= tol {
                    flags.push(BoundaryFlag::ThetaAxis);
                }
                if (c2 - 2.0).abs() <= tol {
                    flags.push(BoundaryFlag::ThetaHalfPi);
                }
                (7, flags)
            }
        } else {
            return Err(inconsistent());
        }
    } else if sum.abs() <= tol {
        // c1 = -c3 != 0
        let floor = c1 * c1 / 4.0 - 2.0;
        if c2 < floor - tol {
            return Err(inconsistent());
        }
        let flags = if (c2 - floor).abs() <= tol { vec![BoundaryFlag::ThetaAxis] } else { vec![] };
        (2, flags)
    } else {
        // c1 = c3 != 0
        let gap = c2 - (c1 * c1 / 4.0 + 2.0);
        if gap > tol {
            (4, vec![])
        } else if gap.abs() <= tol {
            if !diagonalizable {
                if c1.abs() <= 4.0 + tol {
                    let flags = if (c1.abs() - 4.0).abs() <= tol {
                        vec![BoundaryFlag::ThetaAxis]
                    } else {
                        vec![]
                    };
                    (8, flags)
                } else {
                    return Err(inconsistent());
                }
            } else if c1.abs() > 4.0 + tol {
                (4, vec![BoundaryFlag::ThetaAxis])
            } else {
                let flags = if (c1.abs() - 4.0).abs() <= tol {
                    vec![BoundaryFlag::ThetaAxis]
                } else {
                    vec![]
                };
                (6, flags)
            }
        } else {
            (5, vec![])
        }
    };

    let (r, theta, phi) = realized_parameters(cp, case_id);
    Ok(AlgebraicClass {
        case_id,
        representative: TEMPLATES[case_id as usize - 1].to_string(),
        r,
        theta,
        phi,
        boundary_flags: flags,
    })
}

/// Recovers (r, theta, phi) from the quartic roots. Roots come in exact
/// conjugate pairs (real companion matrix), so sorting the upper-half-plane
/// images lexicographically makes paired images adjacent.
fn realized_parameters(cp: &CharPoly, case_id: u8) -> (f64, f64, f64) {
    let mut upper: Vec<Complex64> =
        cp.roots().iter().map(|z| Complex64::new(z.re, z.im.abs())).collect();
    upper.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    if case_id == 8 {
        // single doubled class
        let centroid = upper.iter().sum::<Complex64>() / 4.0;
        let theta = centroid.im.atan2(centroid.re);
        return (1.0, theta, theta);
    }
    let pa = (upper[0] + upper[1]) / 2.0;
    let pb = (upper[2] + upper[3]) / 2.0;
    let (big, small) = if pa.norm() >= pb.norm() { (pa, pb) } else { (pb, pa) };
    let r = (big.norm() / small.norm()).sqrt();
    let (theta, phi) = (big.im.atan2(big.re), small.im.atan2(small.re));
    match case_id {
        5 | 6 | 7 => {
            // unit-modulus families: order angles canonically
            let (theta, phi) = if theta <= phi { (theta, phi) } else { (phi, theta) };
            (1.0, theta, phi)
        }
        _ => (r, theta, phi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{Quaternion, I, ONE};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn qi(x: f64) -> Quaternion {
        Quaternion::new(0.0, x, 0.0, 0.0)
    }

    const T: f64 = 1e-8;

    #[test]
    fn dynamical_examples() {
        let a = QMatrix2::diagonal(qi(2.0), qi(0.5));
        assert_eq!(dynamical_type(&a, T).unwrap(), DynamicalType::Hyperbolic);
        let a = QMatrix2::diagonal(I, ONE);
        assert_eq!(dynamical_type(&a, T).unwrap(), DynamicalType::Elliptic);
        let a = QMatrix2::parabolic(FRAC_PI_3);
        assert_eq!(dynamical_type(&a, T).unwrap(), DynamicalType::Parabolic);
    }

    #[test]
    fn coefficient_identity_examples() {
        let cp = coeff_identities(1.0, 0.0, 0.0).unwrap();
        assert!(cp.approx_eq(&CharPoly::new(4.0, 6.0, 4.0, 1.0), 1e-12));

        let cp = coeff_identities(2.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!(cp.approx_eq(&CharPoly::new(0.0, 17.0 / 4.0, 0.0, 1.0), 1e-12));

        let cp = coeff_identities(1.0, FRAC_PI_4, FRAC_PI_3).unwrap();
        let expected = 2.0 * (FRAC_PI_4.cos() + FRAC_PI_3.cos());
        assert!((cp.c3 - expected).abs() < 1e-12);
        assert!((cp.c1 - expected).abs() < 1e-12);
        assert!((cp.c2 - (4.0 * FRAC_PI_4.cos() * FRAC_PI_3.cos() + 2.0)).abs() < 1e-12);
        assert!((cp.c3 - 2.41421356).abs() < 1e-7);
        assert!((cp.c2 - 3.41421356).abs() < 1e-7);
    }

    #[test]
    fn coefficient_identities_match_embedding_route() {
        for (r, theta, phi) in [(2.0, 0.3, 1.1), (0.4, FRAC_PI_2, 2.9), (1.0, 0.0, PI)] {
            let closed = coeff_identities(r, theta, phi).unwrap();
            let a = QMatrix2::diagonal(
                Quaternion::unit_complex(theta).scale(r),
                Quaternion::unit_complex(phi).scale(1.0 / r),
            );
            let cp = a.char_poly().unwrap();
            assert!(closed.approx_eq(&cp, 1e-10), "mismatch at ({r}, {theta}, {phi})");
        }
    }

    #[test]
    fn coefficient_identities_domain_errors() {
        assert!(matches!(coeff_identities(0.0, 0.1, 0.1), Err(Error::DomainError(_))));
        assert!(matches!(coeff_identities(-1.0, 0.1, 0.1), Err(Error::DomainError(_))));
        assert!(matches!(coeff_identities(1.0, -0.1, 0.1), Err(Error::DomainError(_))));
        assert!(matches!(coeff_identities(1.0, 0.1, 3.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn classification_case_examples() {
        // diag(r i, r^-1 i), r != 1
        let ac = algebraic_class(&CharPoly::new(0.0, 17.0 / 4.0, 0.0, 1.0), true, T).unwrap();
        assert_eq!(ac.case_id, 3);
        assert!((ac.r - 2.0).abs() < 1e-9);

        // identity: case 6 at the theta = 0 boundary
        let ac = algebraic_class(&CharPoly::new(4.0, 6.0, 4.0, 1.0), true, T).unwrap();
        assert_eq!(ac.case_id, 6);
        assert!(ac.boundary_flags.contains(&BoundaryFlag::ThetaAxis));
        assert!(ac.theta.abs() < 1e-6);

        // generic two-angle hyperbolic: non-reversible case 1
        let cp = coeff_identities(2.0, FRAC_PI_4, FRAC_PI_3).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 1);
        assert!((ac.r - 2.0).abs() < 1e-9);
    }

    #[test]
    fn classification_rotatory_half_turn() {
        let theta = PI / 5.0;
        let cp = coeff_identities(2.0, theta, PI - theta).unwrap();
        assert!((cp.c1 + cp.c3).abs() < 1e-12);
        assert!(cp.c1.abs() > 1e-3);
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 2);
        assert!(ac.boundary_flags.is_empty());
        // the axis boundary theta in {0, pi}
        let cp = coeff_identities(2.0, 0.0, PI).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 2);
        assert!(ac.boundary_flags.contains(&BoundaryFlag::ThetaAxis));
    }

    #[test]
    fn classification_on_the_parabola_uses_diagonalizability() {
        let cp = QMatrix2::parabolic(FRAC_PI_3).char_poly().unwrap();
        let ac = algebraic_class(&cp, false, T).unwrap();
        assert_eq!(ac.case_id, 8);
        assert!((ac.theta - FRAC_PI_3).abs() < 1e-9);
        // same coefficients, diagonalizable: elliptic equal-angle family
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 6);
        assert!((ac.theta - FRAC_PI_3).abs() < 1e-9);

        // axis hyperbolic diag(2, 1/2): same parabola, |c1| > 4
        let cp = coeff_identities(2.0, 0.0, 0.0).unwrap();
        assert!((cp.c2 - (cp.c1 * cp.c1 / 4.0 + 2.0)).abs() < 1e-12);
        assert!(cp.c1.abs() > 4.0);
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 4);
        assert!(ac.boundary_flags.contains(&BoundaryFlag::ThetaAxis));
    }

    #[test]
    fn classification_unit_pi_pair_family() {
        // theta + phi = pi with r = 1: c1 = c3 = 0, -2 <= c2 <= 2
        let theta = FRAC_PI_3;
        let cp = coeff_identities(1.0, theta, PI - theta).unwrap();
        assert!(cp.c1.abs() < 1e-12 && cp.c3.abs() < 1e-12);
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 7);
        assert!(ac.boundary_flags.is_empty());

        // boundary theta in {0, pi}: diag(1, -1), c2 = -2
        let cp = coeff_identities(1.0, 0.0, PI).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 7);
        assert!(ac.boundary_flags.contains(&BoundaryFlag::ThetaAxis));

        // boundary theta = pi/2: diag(i, i), c2 = 2, diagonalizable
        let cp = coeff_identities(1.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 7);
        assert!(ac.boundary_flags.contains(&BoundaryFlag::ThetaHalfPi));
        // ... and the non-diagonalizable twin is the half-turn parabolic
        let ac = algebraic_class(&cp, false, T).unwrap();
        assert_eq!(ac.case_id, 8);
    }

    #[test]
    fn classification_elliptic_families() {
        let cp = coeff_identities(1.0, 0.4, 1.3).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 5);
        assert!((ac.theta - 0.4).abs() < 1e-9 && (ac.phi - 1.3).abs() < 1e-9);

        let cp = coeff_identities(1.0, 0.9, 0.9).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 6);
        assert!(ac.boundary_flags.is_empty());

        let cp = coeff_identities(3.0, 0.9, 0.9).unwrap();
        let ac = algebraic_class(&cp, true, T).unwrap();
        assert_eq!(ac.case_id, 4);
        assert!((ac.r - 3.0).abs() < 1e-9);
    }

    #[test]
    fn classification_rejects_bad_inputs() {
        let err = algebraic_class(&CharPoly::new(0.0, 2.0, 0.0, 3.0), true, T);
        assert!(matches!(err, Err(Error::NotUnitDeterminant { .. })));
        let err = algebraic_class(&CharPoly::new(0.0, -3.0, 0.0, 1.0), true, T);
        assert!(matches!(err, Err(Error::InconsistentInvariants { .. })));
    }

    #[test]
    fn exactly_one_case_fires_on_interior_samples() {
        // mini-grid smoke test; the verification suite runs the full grid
        let triples = [
            (2.0, 0.4, 1.2),
            (2.0, 0.4, PI - 0.4),
            (2.0, FRAC_PI_2, FRAC_PI_2),
            (2.0, 0.4, 0.4),
            (1.0, 0.4, 1.2),
            (1.0, 0.4, 0.4),
            (1.0, 0.4, PI - 0.4),
        ];
        for (r, theta, phi) in triples {
            let cp = coeff_identities(r, theta, phi).unwrap();
            let ac = algebraic_class(&cp, true, T).unwrap();
            let expected = match (r != 1.0, theta == phi, theta + phi == PI) {
                (true, false, false) => 1,
                (true, false, true) => 2,
                (true, true, _) if theta == FRAC_PI_2 => 3,
                (true, true, _) => 4,
                (false, false, false) => 5,
                (false, true, _) if theta != FRAC_PI_2 => 6,
                (false, _, _) => 7,
            };
            assert_eq!(ac.case_id, expected, "at ({r}, {theta}, {phi})");
        }
    }
}
