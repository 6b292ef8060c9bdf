//! Reversibility and strong reversibility in SL(2,H) and PSL(2,H).
//!
//! An element is reversible in SL(2,H) when it is conjugate to its inverse;
//! it is strongly reversible when the conjugation can be done by an
//! involution, equivalently when it is a product of two involutions. In the
//! projective group both lifts `A` and `-A` represent the same element, so
//! `[A]` is reversible in PSL(2,H) exactly when `A` is conjugate to `A^-1`
//! or to `-A^-1` in SL(2,H); this turns out to be equivalent to strong
//! reversibility in PSL(2,H), and to the single coefficient condition
//! `c1^2 = c3^2`.
//!
//! Every reversible verdict here is constructive: reversers are produced by
//! conjugating a fixed table of canonical-frame reversers through the
//! normal-form witness, and factorizations into (skew-)involutions are
//! assembled from those reversers and verified numerically.
//!
//! Canonical-frame reverser tables (for `N` the normal form, `g N g^-1 = N^-1`):
//!
//! | family                                   | skew reverser (g^2 = -I) | involutive reverser (g^2 = I) |
//! |------------------------------------------|--------------------------|-------------------------------|
//! | `diag(e^it, e^ip)` (any angles)          | `diag(j, j)`             | none unless angles axis/equal |
//! | `diag(r e^it, r^-1 e^it)`                | `(0 j; j 0)`             | `(0 j; -j 0)`                 |
//! | `diag(+-1, +-1)`                         | `diag(j, j)`             | `I`                           |
//! | parabolic theta                          | `diag(-e^{-2it} j, j)`   | `diag(1, -1)` for axis theta  |
//!
//! and for `g N g^-1 = -N^-1` (all skew-involutions):
//!
//! | family                                   | reverser          |
//! |------------------------------------------|-------------------|
//! | `diag(r e^it, r^-1 e^{i(pi-t)})`         | `(0 1; -1 0)`     |
//! | parabolic pi/2                           | `diag(i, -i)`     |

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::qmat::QMatrix2;
use crate::quat::{self, Quaternion};
use crate::spectral::{normal_form, ConjugacyWitness, NormalForm};

/// Requested conjugation target for [`construct_reverser`]: `A^-1` for
/// `Plus`, `-A^-1` for `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReverserSign {
    Plus,
    Minus,
}

/// Factorization mode for [`decompose_involutions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionMode {
    /// Both factors square to `I` (requires strong reversibility in SL).
    Involutions,
    /// Both factors square to `-I` (requires reversibility in SL).
    SkewInvolutions,
    /// Factors square to `I` or `-I` independently; both project to
    /// involutions in PSL(2,H).
    Psl,
}

impl DecompositionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecompositionMode::Involutions => "sl-involutions",
            DecompositionMode::SkewInvolutions => "sl-skew",
            DecompositionMode::Psl => "psl",
        }
    }
}

/// A verified two-factor product `b * c = a` with `b^2 = b_sign * I` and
/// `c^2 = c_sign * I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub b: QMatrix2,
    pub c: QMatrix2,
    pub b_sign: i8,
    pub c_sign: i8,
}

impl Factorization {
    /// Residual over the three defining equations.
    pub fn residual(&self, a: &QMatrix2) -> f64 {
        let id = QMatrix2::identity();
        let rb = (self.b * self.b).distance_inf(&id.scale(self.b_sign as f64));
        let rc = (self.c * self.c).distance_inf(&id.scale(self.c_sign as f64));
        let rp = (self.b * self.c).distance_inf(a);
        rb.max(rc).max(rp)
    }
}

/// Full reversibility verdict with constructive evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversibilityReport {
    pub reversible_sl: bool,
    pub strongly_reversible_sl: bool,
    /// `A` is conjugate to `-A^-1` in SL(2,H).
    pub conj_neg_inverse: bool,
    pub reversible_psl: bool,
    pub strongly_reversible_psl: bool,
    /// The coefficient test `c1^2 = c3^2`.
    pub c1_sq_eq_c3_sq: bool,
    /// Sign of the attached reverser: `g A g^-1 = sign * A^-1`.
    pub reverser_sign: Option<i8>,
    pub reverser: Option<QMatrix2>,
    pub reverser_residual: Option<f64>,
    /// Two-involution factorization in PSL (lifts squaring to `+-I`).
    pub factorization: Option<Factorization>,
    pub factorization_residual: Option<f64>,
}

/// Membership of `g` in the extended centralizer of `A`.
///
/// When `A` squares to `+-I` the three sets overlap; the verdict then picks
/// the first match in the order centralizer, reverser, negative reverser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipVerdict {
    Centralizer,
    Reverser,
    NegReverser,
    None,
}

/// Conjugacy class of an involution of PSL(2,H).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InvolutionClass {
    /// `A = sign * I`.
    Central { sign: i8 },
    /// `A^2 = I`, `A != +-I`: conjugate to `diag(1, -1)` by the witness.
    PlusInvolution { witness: QMatrix2 },
    /// `A^2 = -I`: conjugate to `(0 1; -1 0)` by the witness.
    SkewInvolution { witness: QMatrix2 },
    NotInvolution,
}

fn near(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn is_axis_angle(t: f64, tol: f64) -> bool {
    t.abs() <= tol || (PI - t).abs() <= tol
}

/// Family predicate: conjugate to its inverse in SL(2,H).
fn form_reversible(form: &NormalForm, tol: f64) -> bool {
    match *form {
        NormalForm::Diagonal { r, theta, phi } => near(r, 1.0, tol) || near(theta, phi, tol),
        NormalForm::Parabolic { .. } => true,
    }
}

/// Family predicate: conjugated to its inverse by an involution.
fn form_strongly_reversible(form: &NormalForm, tol: f64) -> bool {
    match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            near(theta, phi, tol)
                || (near(r, 1.0, tol) && is_axis_angle(theta, tol) && is_axis_angle(phi, tol))
        }
        NormalForm::Parabolic { theta } => is_axis_angle(theta, tol),
    }
}

/// Family predicate: conjugate to the negated inverse in SL(2,H).
fn form_conj_neg_inverse(form: &NormalForm, tol: f64) -> bool {
    match *form {
        NormalForm::Diagonal { theta, phi, .. } => near(theta + phi, PI, tol),
        NormalForm::Parabolic { theta } => near(theta, FRAC_PI_2, tol),
    }
}

/// `a j` for complex `a = x + y i`, i.e. `x j + y k`.
fn complex_times_j(x: f64, y: f64) -> Quaternion {
    Quaternion::new(0.0, 0.0, x, y)
}

/// Canonical-frame skew reverser: `g^2 = -I` and `g N g^-1 = N^-1`.
fn skew_reverser_table(form: &NormalForm, tol: f64) -> Option<QMatrix2> {
    match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            if near(r, 1.0, tol) {
                Some(QMatrix2::diagonal(quat::J, quat::J))
            } else if near(theta, phi, tol) {
                Some(QMatrix2::anti_diagonal(quat::J, quat::J))
            } else {
                None
            }
        }
        NormalForm::Parabolic { theta } => {
            let (c2, s2) = ((-2.0 * theta).cos(), (-2.0 * theta).sin());
            Some(QMatrix2::diagonal(-complex_times_j(c2, s2), quat::J))
        }
    }
}

/// Canonical-frame involutive reverser: `g^2 = I` and `g N g^-1 = N^-1`.
fn involution_reverser_table(form: &NormalForm, tol: f64) -> Option<QMatrix2> {
    match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            if near(r, 1.0, tol) && is_axis_angle(theta, tol) && is_axis_angle(phi, tol) {
                // real diagonal with +-1 entries: it is its own inverse
                Some(QMatrix2::identity())
            } else if near(theta, phi, tol) {
                Some(QMatrix2::anti_diagonal(quat::J, -quat::J))
            } else {
                None
            }
        }
        NormalForm::Parabolic { theta } => is_axis_angle(theta, tol)
            .then(|| QMatrix2::diagonal(quat::ONE, -quat::ONE)),
    }
}

/// Canonical-frame negative reverser: `g^2 = -I` and `g N g^-1 = -N^-1`.
fn neg_reverser_table(form: &NormalForm, tol: f64) -> Option<QMatrix2> {
    match *form {
        NormalForm::Diagonal { theta, phi, .. } => near(theta + phi, PI, tol)
            .then(|| QMatrix2::anti_diagonal(quat::ONE, -quat::ONE)),
        NormalForm::Parabolic { theta } => {
            near(theta, FRAC_PI_2, tol).then(|| QMatrix2::diagonal(quat::I, -quat::I))
        }
    }
}

/// True when `A` is conjugate to `A^-1` in SL(2,H).
pub fn is_reversible_sl(a: &QMatrix2, tol: f64) -> Result<bool> {
    let (form, _) = normal_form(a, tol)?;
    Ok(form_reversible(&form, tol.max(crate::tol::SPECTRAL)))
}

/// True when `A` is conjugated to `A^-1` by an involution of SL(2,H);
/// equivalently, `A` is a product of two involutions.
pub fn is_strongly_reversible_sl(a: &QMatrix2, tol: f64) -> Result<bool> {
    let (form, _) = normal_form(a, tol)?;
    Ok(form_strongly_reversible(&form, tol.max(crate::tol::SPECTRAL)))
}

/// True when `A` is conjugate to `-A^-1` in SL(2,H).
pub fn is_conj_neg_inverse(a: &QMatrix2, tol: f64) -> Result<bool> {
    let (form, _) = normal_form(a, tol)?;
    Ok(form_conj_neg_inverse(&form, tol.max(crate::tol::SPECTRAL)))
}

fn conjugate_table_element(g0: QMatrix2, witness: &ConjugacyWitness) -> Result<QMatrix2> {
    g0.conjugate_by(&witness.s)
}

/// Builds `g` in SL(2,H) with `g A g^-1 = A^-1` (sign `Plus`) or
/// `g A g^-1 = -A^-1` (sign `Minus`), by conjugating the canonical-frame
/// reverser through the normal-form witness.
pub fn construct_reverser(a: &QMatrix2, sign: ReverserSign, tol: f64) -> Result<QMatrix2> {
    let id = QMatrix2::identity();
    let table_tol = tol.max(crate::tol::SPECTRAL);
    // central +-I: reverser I for the plus sign, nothing for minus
    if a.approx_eq(&id, table_tol) || a.approx_eq(&-id, table_tol) {
        return match sign {
            ReverserSign::Plus => Ok(id),
            ReverserSign::Minus => Err(Error::NotReversible { sign: '-' }),
        };
    }
    let (form, witness) = normal_form(a, tol)?;
    let g0 = match sign {
        ReverserSign::Plus => skew_reverser_table(&form, table_tol)
            .ok_or(Error::NotReversible { sign: '+' })?,
        ReverserSign::Minus => neg_reverser_table(&form, table_tol)
            .ok_or(Error::NotReversible { sign: '-' })?,
    };
    let g = conjugate_table_element(g0, &witness)?;
    let target = match sign {
        ReverserSign::Plus => a.inverse()?,
        ReverserSign::Minus => -a.inverse()?,
    };
    let residual = (g * *a * g.inverse()?).distance_inf(&target);
    if residual > crate::tol::WITNESS_LIMIT {
        return Err(Error::NumericalBreakdown {
            residual,
            limit: crate::tol::WITNESS_LIMIT,
        });
    }
    Ok(g)
}

/// Factors `A` into `B * C` with the squares of `B` and `C` pinned to `+-I`
/// according to `mode`.
pub fn decompose_involutions(
    a: &QMatrix2,
    mode: DecompositionMode,
    tol: f64,
) -> Result<Factorization> {
    let table_tol = tol.max(crate::tol::SPECTRAL);
    let not_decomposable = || Error::NotDecomposable { mode: mode.as_str() };
    let (form, witness) = normal_form(a, tol)?;
    let fact = match mode {
        DecompositionMode::Involutions => {
            let h0 = involution_reverser_table(&form, table_tol).ok_or_else(not_decomposable)?;
            let h = conjugate_table_element(h0, &witness)?;
            // h^2 = I and h A h^-1 = A^-1 make (hA)^2 = I
            Factorization { b: h, c: h * *a, b_sign: 1, c_sign: 1 }
        }
        DecompositionMode::SkewInvolutions => {
            let g0 = skew_reverser_table(&form, table_tol).ok_or_else(not_decomposable)?;
            let g = conjugate_table_element(g0, &witness)?;
            // g^2 = -I gives g^-1 = -g and (gA)^2 = A^-1 g^2 A = -I
            Factorization { b: -g, c: g * *a, b_sign: -1, c_sign: -1 }
        }
        DecompositionMode::Psl => {
            if form_strongly_reversible(&form, table_tol) {
                decompose_involutions(a, DecompositionMode::Involutions, tol)?
            } else if let Some(g0) = neg_reverser_table(&form, table_tol) {
                let g = conjugate_table_element(g0, &witness)?;
                // g A g^-1 = -A^-1 with skew g: A = (-g^-1 A^-1)(g) and the
                // first factor squares to I
                Factorization { b: g * a.inverse()?, c: g, b_sign: 1, c_sign: -1 }
            } else if form_reversible(&form, table_tol) {
                decompose_involutions(a, DecompositionMode::SkewInvolutions, tol)?
            } else {
                return Err(not_decomposable());
            }
        }
    };
    let residual = fact.residual(a);
    if residual > crate::tol::WITNESS_LIMIT {
        return Err(Error::NumericalBreakdown { residual, limit: crate::tol::WITNESS_LIMIT });
    }
    Ok(fact)
}

/// Full PSL reversibility report.
///
/// The projective verdict is computed twice: from the normal-form route
/// (`reversible_sl || conj_neg_inverse`) and from the coefficient test
/// `|c1^2 - c3^2| <= tol`; disagreement is an internal error. When
/// reversible, a verified reverser and a two-involution PSL factorization
/// are attached.
pub fn psl_report(a: &QMatrix2, tol: f64) -> Result<ReversibilityReport> {
    let table_tol = tol.max(crate::tol::SPECTRAL);
    let (form, _) = normal_form(a, tol)?;
    let cp = a.char_poly()?;

    let reversible_sl = form_reversible(&form, table_tol);
    let strongly_reversible_sl = form_strongly_reversible(&form, table_tol);
    let conj_neg_inverse = form_conj_neg_inverse(&form, table_tol);
    let reversible_psl = reversible_sl || conj_neg_inverse;
    let c1_sq_eq_c3_sq = (cp.c1 * cp.c1 - cp.c3 * cp.c3).abs() <= table_tol;

    if reversible_psl != c1_sq_eq_c3_sq {
        return Err(Error::InternalInconsistency(format!(
            "normal-form route says reversible_psl = {reversible_psl} but \
             |c1^2 - c3^2| = {:e}",
            (cp.c1 * cp.c1 - cp.c3 * cp.c3).abs()
        )));
    }

    let (reverser_sign, reverser) = if reversible_sl {
        (Some(1), Some(construct_reverser(a, ReverserSign::Plus, tol)?))
    } else if conj_neg_inverse {
        (Some(-1), Some(construct_reverser(a, ReverserSign::Minus, tol)?))
    } else {
        (None, None)
    };
    let reverser_residual = match (&reverser, reverser_sign) {
        (Some(g), Some(sign)) => {
            let target = a.inverse()?.scale(sign as f64);
            Some((*g * *a * g.inverse()?).distance_inf(&target))
        }
        _ => None,
    };

    let factorization = if reversible_psl {
        Some(decompose_involutions(a, DecompositionMode::Psl, tol)?)
    } else {
        None
    };
    let factorization_residual = factorization.as_ref().map(|f| f.residual(a));

    // strong reversibility in PSL is witnessed by the verified factorization
    let strongly_reversible_psl = factorization.is_some();

    Ok(ReversibilityReport {
        reversible_sl,
        strongly_reversible_sl,
        conj_neg_inverse,
        reversible_psl,
        strongly_reversible_psl,
        c1_sq_eq_c3_sq,
        reverser_sign,
        reverser,
        reverser_residual,
        factorization,
        factorization_residual,
    })
}

/// Numerical membership of `g` in the extended centralizer of `A`:
/// centralizer, reverser (`g A g^-1 = A^-1`) or negative reverser
/// (`g A g^-1 = -A^-1`).
///
/// When `A` is one of the canonical normal forms the verdict is
/// cross-checked against the parametrized structural tables (see
/// [`structural_membership`]); the numerical verdict wins on disagreement,
/// which can only occur at tolerance boundaries.
pub fn extended_centralizer_membership(
    a: &QMatrix2,
    g: &QMatrix2,
    tol: f64,
) -> Result<MembershipVerdict> {
    g.require_unit_det(tol.max(crate::tol::SPECTRAL))?;
    let conj = *g * *a * g.inverse()?;
    let inv = a.inverse()?;
    let scale = 1.0f64.max(a.norm_inf()).max(inv.norm_inf());
    let threshold = tol.max(crate::tol::SPECTRAL) * scale;
    let verdict = if conj.distance_inf(a) <= threshold {
        MembershipVerdict::Centralizer
    } else if conj.distance_inf(&inv) <= threshold {
        MembershipVerdict::Reverser
    } else if conj.distance_inf(&-inv) <= threshold {
        MembershipVerdict::NegReverser
    } else {
        MembershipVerdict::None
    };
    debug_assert!(
        structural_membership(a, g, tol).map(|s| s == verdict).unwrap_or(true),
        "structural table disagrees with numerical membership"
    );
    Ok(verdict)
}

/// Shape of a matrix that is literally one of the normal-form families
/// (with upper-half-plane complex entries); angle ordering is irrelevant
/// for the membership tables.
enum CanonicalShape {
    Diagonal { r1: f64, theta: f64, phi: f64 },
    Parabolic { theta: f64 },
}

fn detect_canonical_shape(a: &QMatrix2, tol: f64) -> Option<CanonicalShape> {
    let entries_complex = a.a.is_complex(tol)
        && a.b.is_complex(tol)
        && a.c.is_complex(tol)
        && a.d.is_complex(tol);
    if !entries_complex {
        return None;
    }
    let (la, _) = a.a.complex_parts();
    let (ld, _) = a.d.complex_parts();
    if a.b.norm() <= tol && a.c.norm() <= tol {
        // diagonal with upper-half-plane entries and reciprocal moduli
        if la.im < -tol || ld.im < -tol {
            return None;
        }
        let (r1, r2) = (la.norm(), ld.norm());
        if (r1 * r2 - 1.0).abs() > 10.0 * tol.max(1e-9) {
            return None;
        }
        let theta = la.im.max(0.0).atan2(la.re);
        let phi = ld.im.max(0.0).atan2(ld.re);
        Some(CanonicalShape::Diagonal { r1, theta, phi })
    } else if a.c.norm() <= tol
        && (a.b - quat::ONE).norm() <= tol
        && (a.a - a.d).norm() <= tol
        && (la.norm() - 1.0).abs() <= tol
        && la.im >= -tol
    {
        Some(CanonicalShape::Parabolic { theta: la.im.max(0.0).atan2(la.re) })
    } else {
        None
    }
}

fn in_complex_j(q: Quaternion, tol: f64) -> bool {
    q.w.abs() <= tol && q.x.abs() <= tol
}

/// Structural membership check against the parametrized centralizer /
/// reverser / negative-reverser tables of the canonical families. Returns
/// `None` when `A` is not in canonical normal form or `g` matches no table.
///
/// Angle parameters at the interval ends `{0, pi}` relax the corresponding
/// entry constraints from "complex" (resp. "complex times j") to arbitrary
/// quaternions, mirroring how real diagonal entries commute with all of H.
pub fn structural_membership(a: &QMatrix2, g: &QMatrix2, tol: f64) -> Option<MembershipVerdict> {
    let tol = tol.max(crate::tol::SPECTRAL);
    let etol = tol * 10.0 * (1.0 + g.norm_inf());
    let shape = detect_canonical_shape(a, tol)?;

    // an angle parameter on the axis {0, pi} relaxes "complex" entry
    // constraints to arbitrary quaternions
    let complex_ok = |q: Quaternion, interior: bool| !interior || q.is_complex(etol);
    let complex_j_ok = |q: Quaternion, interior: bool| !interior || in_complex_j(q, etol);

    match shape {
        CanonicalShape::Diagonal { r1, theta, phi } => {
            let unit = near(r1, 1.0, tol);
            let equal = near(theta, phi, tol);
            let ti = !is_axis_angle(theta, tol);
            let pi_ = !is_axis_angle(phi, tol);
            let zero_off_diag = g.b.norm() <= etol && g.c.norm() <= etol;
            let zero_diag = g.a.norm() <= etol && g.d.norm() <= etol;

            // centralizer rows
            if unit && equal {
                if !ti {
                    return Some(MembershipVerdict::Centralizer); // A = +-I
                }
                if [g.a, g.b, g.c, g.d].iter().all(|q| q.is_complex(etol)) {
                    return Some(MembershipVerdict::Centralizer);
                }
            } else if zero_off_diag && complex_ok(g.a, ti) && complex_ok(g.d, pi_) {
                return Some(MembershipVerdict::Centralizer);
            }

            // reverser rows
            if unit && equal && ti {
                if [g.a, g.b, g.c, g.d].iter().all(|q| in_complex_j(*q, etol)) {
                    return Some(MembershipVerdict::Reverser);
                }
            } else if unit && !equal {
                if zero_off_diag && complex_j_ok(g.a, ti) && complex_j_ok(g.d, pi_) {
                    return Some(MembershipVerdict::Reverser);
                }
            } else if !unit && equal && zero_diag && complex_j_ok(g.b, ti) && complex_j_ok(g.c, ti)
            {
                return Some(MembershipVerdict::Reverser);
            }

            // negative-reverser rows: the theta + phi = pi families; for
            // diag(i, i) the set equals the centralizer, caught above
            if near(theta + phi, PI, tol)
                && !(unit && equal)
                && zero_diag
                && complex_ok(g.b, ti)
                && complex_ok(g.c, ti)
            {
                return Some(MembershipVerdict::NegReverser);
            }
            None
        }
        CanonicalShape::Parabolic { theta } => {
            let interior = !is_axis_angle(theta, tol);
            // centralizer: (a b; 0 a)
            if g.c.norm() <= etol
                && (g.a - g.d).norm() <= etol
                && complex_ok(g.a, interior)
                && complex_ok(g.b, interior)
            {
                return Some(MembershipVerdict::Centralizer);
            }
            // reverser: (-e^{-2 i theta} a j, b j; 0, a j); on the axis the
            // rotation factor is 1 and a, b range over all quaternions
            let rot = Quaternion::unit_complex(-2.0 * theta);
            if g.c.norm() <= etol
                && (g.a + rot * g.d).norm() <= etol
                && complex_j_ok(g.d, interior)
                && complex_j_ok(g.b, interior)
            {
                return Some(MembershipVerdict::Reverser);
            }
            // negative reverser at theta = pi/2: (a b; 0 -a), complex entries
            if near(theta, FRAC_PI_2, tol)
                && g.c.norm() <= etol
                && (g.a + g.d).norm() <= etol
                && g.a.is_complex(etol)
                && g.b.is_complex(etol)
            {
                return Some(MembershipVerdict::NegReverser);
            }
            None
        }
    }
}

/// Classifies `A` as an involution, skew-involution, central element or
/// none of these; for proper (skew-)involutions a conjugating witness to
/// the canonical representative is attached.
pub fn classify_involution(a: &QMatrix2, tol: f64) -> Result<InvolutionClass> {
    a.require_unit_det(tol.max(crate::tol::SPECTRAL))?;
    let tol = tol.max(crate::tol::SPECTRAL);
    let id = QMatrix2::identity();
    let sq = *a * *a;
    if sq.distance_inf(&id) <= tol {
        if a.approx_eq(&id, tol) {
            return Ok(InvolutionClass::Central { sign: 1 });
        }
        if a.approx_eq(&-id, tol) {
            return Ok(InvolutionClass::Central { sign: -1 });
        }
        // A^2 = I, A != +-I: the canonical form is diag(1, -1) itself
        let (form, wit) = normal_form(a, tol)?;
        let expected = NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: PI };
        if !form.approx_eq(&expected, 10.0 * tol) {
            return Err(Error::InternalInconsistency(format!(
                "involution with unexpected normal form {form:?}"
            )));
        }
        return Ok(InvolutionClass::PlusInvolution { witness: wit.s });
    }
    if sq.distance_inf(&-id) <= tol {
        // A^2 = -I: canonical form diag(i, i); rebase the witness onto the
        // real representative (0 1; -1 0)
        let (form, wit) = normal_form(a, tol)?;
        let expected = NormalForm::Diagonal { r: 1.0, theta: FRAC_PI_2, phi: FRAC_PI_2 };
        if !form.approx_eq(&expected, 10.0 * tol) {
            return Err(Error::InternalInconsistency(format!(
                "skew-involution with unexpected normal form {form:?}"
            )));
        }
        let target = QMatrix2::anti_diagonal(quat::ONE, -quat::ONE);
        let (_, wit_target) = normal_form(&target, tol)?;
        let witness = wit.s * wit_target.s.inverse()?;
        return Ok(InvolutionClass::SkewInvolution { witness });
    }
    Ok(InvolutionClass::NotInvolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{I, J, K, ONE, ZERO};
    use std::f64::consts::FRAC_PI_3;

    const T: f64 = 1e-8;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn qi(x: f64) -> Quaternion {
        q(0.0, x, 0.0, 0.0)
    }

    fn unit_diag(theta: f64, phi: f64) -> QMatrix2 {
        QMatrix2::diagonal(Quaternion::unit_complex(theta), Quaternion::unit_complex(phi))
    }

    fn test_conjugator() -> QMatrix2 {
        let u1 = q(1.0, -0.5, 2.0, 0.25);
        let u1 = u1 / u1.norm();
        let u2 = q(2.0, 1.0, -0.5, 1.0);
        let u2 = u2 / u2.norm();
        let diag = QMatrix2::diagonal(u1, u2);
        let upper = QMatrix2::new(ONE, q(0.3, 0.1, -0.4, 0.2), ZERO, ONE);
        let lower = QMatrix2::new(ONE, ZERO, q(0.1, -0.3, 0.2, 0.4), ONE);
        diag * upper * lower
    }

    #[test]
    fn reverser_tables_have_unit_determinant_and_reverse() {
        let forms = [
            NormalForm::Diagonal { r: 1.0, theta: 0.8, phi: 0.8 },
            NormalForm::Diagonal { r: 1.0, theta: 0.3, phi: 2.0 },
            NormalForm::Diagonal { r: 2.0, theta: 1.1, phi: 1.1 },
            NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: PI },
            NormalForm::Parabolic { theta: 1.3 },
            NormalForm::Parabolic { theta: 0.0 },
        ];
        for form in forms {
            let n = form.materialize();
            let ninv = n.inverse().unwrap();
            if let Some(g) = skew_reverser_table(&form, 1e-9) {
                assert!((g.det_h().unwrap() - 1.0).abs() < 1e-12, "{form:?}");
                assert!((g * g).approx_eq(&-QMatrix2::identity(), 1e-12), "{form:?}");
                assert!((g * n * g.inverse().unwrap()).approx_eq(&ninv, 1e-12), "{form:?}");
            } else {
                panic!("every listed form is reversible: {form:?}");
            }
            if let Some(h) = involution_reverser_table(&form, 1e-9) {
                assert!((h.det_h().unwrap() - 1.0).abs() < 1e-12);
                assert!((h * h).approx_eq(&QMatrix2::identity(), 1e-12));
                assert!((h * n * h.inverse().unwrap()).approx_eq(&ninv, 1e-12), "{form:?}");
            }
        }
        let neg_forms = [
            NormalForm::Diagonal { r: 1.0, theta: 0.9, phi: PI - 0.9 },
            NormalForm::Diagonal { r: 3.0, theta: 0.4, phi: PI - 0.4 },
            NormalForm::Diagonal { r: 1.0, theta: FRAC_PI_2, phi: FRAC_PI_2 },
            NormalForm::Parabolic { theta: FRAC_PI_2 },
        ];
        for form in neg_forms {
            let n = form.materialize();
            let target = -n.inverse().unwrap();
            let g = neg_reverser_table(&form, 1e-9).expect("listed forms satisfy g A g^-1 = -A^-1");
            assert!((g.det_h().unwrap() - 1.0).abs() < 1e-12);
            assert!((g * g).approx_eq(&-QMatrix2::identity(), 1e-12));
            assert!((g * n * g.inverse().unwrap()).approx_eq(&target, 1e-12), "{form:?}");
        }
    }

    #[test]
    fn reversibility_examples() {
        // diag(i, 1) is reversible but not strongly reversible in SL
        let a = QMatrix2::diagonal(I, ONE);
        assert!(is_reversible_sl(&a, T).unwrap());
        assert!(!is_strongly_reversible_sl(&a, T).unwrap());

        // generic two-angle hyperbolic is not reversible
        let b = QMatrix2::diagonal(
            Quaternion::unit_complex(PI / 4.0).scale(2.0),
            Quaternion::unit_complex(PI / 3.0).scale(0.5),
        );
        assert!(!is_reversible_sl(&b, T).unwrap());

        // parabolic blocks are reversible, strongly only on the axis
        let p = QMatrix2::parabolic(FRAC_PI_3);
        assert!(is_reversible_sl(&p, T).unwrap());
        assert!(!is_strongly_reversible_sl(&p, T).unwrap());
        assert!(is_strongly_reversible_sl(&QMatrix2::parabolic(0.0), T).unwrap());

        // diag(1, -1) is strongly reversible
        assert!(is_strongly_reversible_sl(&QMatrix2::diagonal(ONE, -ONE), T).unwrap());
    }

    #[test]
    fn conj_neg_inverse_examples() {
        let a = unit_diag(PI / 5.0, PI - PI / 5.0);
        assert!(is_conj_neg_inverse(&a, T).unwrap());
        let p = QMatrix2::parabolic(FRAC_PI_2); // (i 1; 0 i)
        assert!(is_conj_neg_inverse(&p, T).unwrap());
        assert!(!is_conj_neg_inverse(&QMatrix2::identity(), T).unwrap());
    }

    #[test]
    fn construct_reverser_examples() {
        // canonical diag(i, 1): the table reverser diag(j, j) comes back
        let a = QMatrix2::diagonal(I, ONE);
        let g = construct_reverser(&a, ReverserSign::Plus, T).unwrap();
        assert!(g.approx_eq(&QMatrix2::diagonal(J, J), 1e-9));

        // canonical diag(2, 1/2): the swap (0 j; j 0)
        let a = QMatrix2::diagonal(q(2.0, 0.0, 0.0, 0.0), q(0.5, 0.0, 0.0, 0.0));
        let g = construct_reverser(&a, ReverserSign::Plus, T).unwrap();
        assert!(g.approx_eq(&QMatrix2::anti_diagonal(J, J), 1e-9));

        // (i 1; 0 i): negative reverser diag(i, -i)
        let a = QMatrix2::parabolic(FRAC_PI_2);
        let g = construct_reverser(&a, ReverserSign::Minus, T).unwrap();
        assert!(g.approx_eq(&QMatrix2::diagonal(I, -I), 1e-9));
        let target = -a.inverse().unwrap();
        assert!((g * a * g.inverse().unwrap()).approx_eq(&target, 1e-10));
    }

    #[test]
    fn construct_reverser_on_conjugated_samples() {
        let s = test_conjugator();
        let plus_reps = [
            QMatrix2::diagonal(I, ONE),
            QMatrix2::diagonal(qi(2.0), qi(0.5)),
            QMatrix2::parabolic(1.2),
            unit_diag(0.4, 1.7),
        ];
        for rep in plus_reps {
            let a = rep.conjugate_by(&s).unwrap();
            let g = construct_reverser(&a, ReverserSign::Plus, T).unwrap();
            let residual = (g * a * g.inverse().unwrap()).distance_inf(&a.inverse().unwrap());
            assert!(residual < 1e-8, "residual {residual:e} for {rep:?}");
            assert!((g.det_h().unwrap() - 1.0).abs() < 1e-8);
        }
        let minus_reps = [
            unit_diag(0.7, PI - 0.7),
            QMatrix2::diagonal(
                Quaternion::unit_complex(0.4).scale(2.0),
                Quaternion::unit_complex(PI - 0.4).scale(0.5),
            ),
            QMatrix2::parabolic(FRAC_PI_2),
        ];
        for rep in minus_reps {
            let a = rep.conjugate_by(&s).unwrap();
            let g = construct_reverser(&a, ReverserSign::Minus, T).unwrap();
            let target = -a.inverse().unwrap();
            let residual = (g * a * g.inverse().unwrap()).distance_inf(&target);
            assert!(residual < 1e-8, "residual {residual:e} for {rep:?}");
        }
    }

    #[test]
    fn non_reversible_raises_for_both_signs() {
        let a = QMatrix2::diagonal(
            Quaternion::unit_complex(PI / 4.0).scale(2.0),
            Quaternion::unit_complex(PI / 3.0).scale(0.5),
        );
        assert!(matches!(
            construct_reverser(&a, ReverserSign::Plus, T),
            Err(Error::NotReversible { sign: '+' })
        ));
        assert!(matches!(
            construct_reverser(&a, ReverserSign::Minus, T),
            Err(Error::NotReversible { sign: '-' })
        ));
        // central elements reverse with I but never to the negated inverse
        assert!(construct_reverser(&QMatrix2::identity(), ReverserSign::Plus, T)
            .unwrap()
            .approx_eq(&QMatrix2::identity(), 0.0));
        assert!(matches!(
            construct_reverser(&QMatrix2::identity(), ReverserSign::Minus, T),
            Err(Error::NotReversible { sign: '-' })
        ));
    }

    #[test]
    fn involution_factorization_example() {
        let a = QMatrix2::diagonal(q(2.0, 0.0, 0.0, 0.0), q(0.5, 0.0, 0.0, 0.0));
        let f = decompose_involutions(&a, DecompositionMode::Involutions, T).unwrap();
        assert!(f.b.approx_eq(&QMatrix2::anti_diagonal(J, -J), 1e-9));
        assert!(f.c.approx_eq(&(QMatrix2::anti_diagonal(J, -J) * a), 1e-9));
        assert_eq!((f.b_sign, f.c_sign), (1, 1));
        assert!(f.residual(&a) < 1e-10);
    }

    #[test]
    fn skew_factorization_example() {
        let a = QMatrix2::diagonal(I, ONE);
        let f = decompose_involutions(&a, DecompositionMode::SkewInvolutions, T).unwrap();
        assert!(f.b.approx_eq(&-QMatrix2::diagonal(J, J), 1e-9));
        assert!(f.c.approx_eq(&(QMatrix2::diagonal(J, J) * a), 1e-9));
        assert_eq!((f.b_sign, f.c_sign), (-1, -1));
        assert!(f.residual(&a) < 1e-10);
    }

    #[test]
    fn mixed_psl_factorization_example() {
        let a = QMatrix2::parabolic(FRAC_PI_2);
        let f = decompose_involutions(&a, DecompositionMode::Psl, T).unwrap();
        assert_eq!((f.b_sign, f.c_sign), (1, -1));
        assert!(f.residual(&a) < 1e-10);
        // not strongly reversible in SL, so sl-involutions must fail
        assert!(matches!(
            decompose_involutions(&a, DecompositionMode::Involutions, T),
            Err(Error::NotDecomposable { mode: "sl-involutions" })
        ));
    }

    #[test]
    fn psl_report_examples() {
        let a = QMatrix2::diagonal(I, ONE);
        let rep = psl_report(&a, T).unwrap();
        assert!(rep.reversible_psl);
        assert!(!rep.strongly_reversible_sl);
        assert!(rep.strongly_reversible_psl);
        assert!(rep.c1_sq_eq_c3_sq);
        assert_eq!(rep.reverser_sign, Some(1));
        assert!(rep.reverser_residual.unwrap() < 1e-9);
        assert!(rep.factorization_residual.unwrap() < 1e-9);

        let b = QMatrix2::diagonal(
            Quaternion::unit_complex(PI / 4.0).scale(2.0),
            Quaternion::unit_complex(PI / 3.0).scale(0.5),
        );
        let rep = psl_report(&b, T).unwrap();
        assert!(!rep.reversible_psl);
        assert!(!rep.c1_sq_eq_c3_sq);
        assert!(rep.reverser.is_none() && rep.factorization.is_none());

        let c = QMatrix2::diagonal(
            Quaternion::unit_complex(PI / 5.0).scale(2.0),
            Quaternion::unit_complex(PI - PI / 5.0).scale(0.5),
        );
        let rep = psl_report(&c, T).unwrap();
        assert!(rep.reversible_psl && !rep.reversible_sl && rep.conj_neg_inverse);
        assert_eq!(rep.reverser_sign, Some(-1));
        let cp = c.char_poly().unwrap();
        assert!((cp.c1 + cp.c3).abs() < 1e-9 && cp.c1.abs() > 1e-3);
    }

    #[test]
    fn membership_examples() {
        // centralizer of diag(e^{i t}, e^{i p}): unit complex diagonals
        let a = unit_diag(0.7, 1.9);
        let g = QMatrix2::diagonal(Quaternion::unit_complex(1.234), Quaternion::unit_complex(0.4));
        assert_eq!(
            extended_centralizer_membership(&a, &g, T).unwrap(),
            MembershipVerdict::Centralizer
        );
        assert_eq!(
            structural_membership(&a, &g, T),
            Some(MembershipVerdict::Centralizer)
        );

        // reverser of diag(i, 1): diag(j, j)
        let a = QMatrix2::diagonal(I, ONE);
        let g = QMatrix2::diagonal(J, J);
        assert_eq!(
            extended_centralizer_membership(&a, &g, T).unwrap(),
            MembershipVerdict::Reverser
        );
        assert_eq!(structural_membership(&a, &g, T), Some(MembershipVerdict::Reverser));

        // negative reverser of the canonical half-turn hyperbolic form
        let a = QMatrix2::diagonal(
            Quaternion::unit_complex(PI / 5.0).scale(2.0),
            Quaternion::unit_complex(PI - PI / 5.0).scale(0.5),
        );
        let g = QMatrix2::anti_diagonal(ONE, -ONE);
        assert_eq!(
            extended_centralizer_membership(&a, &g, T).unwrap(),
            MembershipVerdict::NegReverser
        );
        assert_eq!(structural_membership(&a, &g, T), Some(MembershipVerdict::NegReverser));

        // a matrix unrelated to A
        let g = test_conjugator().sl_normalize().unwrap();
        assert_eq!(
            extended_centralizer_membership(&a, &g, T).unwrap(),
            MembershipVerdict::None
        );
    }

    #[test]
    fn involution_classification_examples() {
        let a = QMatrix2::diagonal(ONE, -ONE);
        assert!(matches!(
            classify_involution(&a, T).unwrap(),
            InvolutionClass::PlusInvolution { .. }
        ));

        let a = QMatrix2::diagonal(I, I);
        match classify_involution(&a, T).unwrap() {
            InvolutionClass::SkewInvolution { witness } => {
                let target = QMatrix2::anti_diagonal(ONE, -ONE);
                let back = target.conjugate_by(&witness).unwrap();
                assert!(back.approx_eq(&a, 1e-8), "witness reconstruction failed: {back:?}");
            }
            other => panic!("expected skew involution, got {other:?}"),
        }

        // j I is a skew-involution
        let a = QMatrix2::diagonal(J, J);
        assert!(matches!(
            classify_involution(&a, T).unwrap(),
            InvolutionClass::SkewInvolution { .. }
        ));

        assert!(matches!(
            classify_involution(&QMatrix2::identity(), T).unwrap(),
            InvolutionClass::Central { sign: 1 }
        ));
        assert!(matches!(
            classify_involution(&-QMatrix2::identity(), T).unwrap(),
            InvolutionClass::Central { sign: -1 }
        ));
        assert!(matches!(
            classify_involution(&QMatrix2::parabolic(1.0), T).unwrap(),
            InvolutionClass::NotInvolution
        ));
    }

    #[test]
    fn conjugated_involutions_carry_valid_witnesses() {
        let s = test_conjugator();
        let a = QMatrix2::diagonal(ONE, -ONE).conjugate_by(&s).unwrap();
        match classify_involution(&a, T).unwrap() {
            InvolutionClass::PlusInvolution { witness } => {
                let target = QMatrix2::diagonal(ONE, -ONE);
                assert!(target.conjugate_by(&witness).unwrap().approx_eq(&a, 1e-8));
                assert!((witness.det_h().unwrap() - 1.0).abs() < 1e-8);
            }
            other => panic!("expected plus involution, got {other:?}"),
        }
        let a = QMatrix2::diagonal(K, -K).conjugate_by(&s).unwrap();
        match classify_involution(&a, T).unwrap() {
            InvolutionClass::SkewInvolution { witness } => {
                let target = QMatrix2::anti_diagonal(ONE, -ONE);
                assert!(target.conjugate_by(&witness).unwrap().approx_eq(&a, 1e-8));
            }
            other => panic!("expected skew involution, got {other:?}"),
        }
    }

    #[test]
    fn reverser_set_elements_never_square_to_identity_off_axis() {
        // diag(e^{i t}, e^{i p}) with interior t != p: reversers are
        // diag(a j, b j); their squares are negative reals
        let id = QMatrix2::identity();
        for (za, zb) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (0.3, 1.1)] {
            let a = Quaternion::unit_complex(0.3).scale(za);
            let b = Quaternion::unit_complex(-1.0).scale(zb);
            let g = QMatrix2::diagonal(a * J, b * J).sl_normalize().unwrap();
            let dist = (g * g).distance_inf(&id);
            assert!(dist >= 1.0, "involution found in the reverser set: {dist}");
        }
    }
}
