//! Seeded random generation of SL(2,H) elements by conjugacy family.
//!
//! Families are sampled in normal-form parameter space with a configurable
//! margin away from every predicate boundary (equal angles, complementary
//! angles, unit modulus, axis and half-turn angles), then conjugated by a
//! random well-conditioned element of SL(2,H). Everything is driven by a
//! ChaCha stream cipher RNG, so identical seeds reproduce identical
//! matrices byte for byte.

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::qmat::QMatrix2;
use crate::quat::{self, Quaternion};
use crate::spectral::{svd4, NormalForm};

/// Conjugacy families the generator can draw from. `Case(1..=8)` mirrors
/// the algebraic classification; the named variants cover boundary families
/// the interior cases deliberately avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// One of the eight interior classification cases.
    Case(u8),
    /// Parabolic with axis angle (theta in {0, pi}); strongly reversible.
    ParabolicAxis,
    /// The half-turn parabolic `(i 1; 0 i)` family (theta = pi/2 exactly).
    ParabolicHalfTurn,
    /// Hyperbolic with axis angles: `diag(r, r^-1)` up to conjugacy.
    HyperbolicAxis,
    /// `+I` or `-I`.
    Central,
    /// Conjugates of `diag(1, -1)`.
    Involution,
    /// Conjugates of `(0 1; -1 0)` (squares to `-I`).
    SkewInvolution,
}

impl Family {
    /// The interior cases plus every boundary family; the mix used by the
    /// verification suite.
    pub fn all() -> Vec<Family> {
        let mut fams: Vec<Family> = (1..=8).map(Family::Case).collect();
        fams.extend([
            Family::ParabolicAxis,
            Family::ParabolicHalfTurn,
            Family::HyperbolicAxis,
            Family::Central,
            Family::Involution,
            Family::SkewInvolution,
        ]);
        fams
    }

    pub fn name(&self) -> String {
        match self {
            Family::Case(k) => format!("case-{k}"),
            Family::ParabolicAxis => "parabolic-axis".into(),
            Family::ParabolicHalfTurn => "parabolic-half-turn".into(),
            Family::HyperbolicAxis => "hyperbolic-axis".into(),
            Family::Central => "central".into(),
            Family::Involution => "involution".into(),
            Family::SkewInvolution => "skew-involution".into(),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fam = match s {
            "case-1" | "hyperbolic-generic" => Family::Case(1),
            "case-2" | "rotatory-half-turn" => Family::Case(2),
            "case-3" | "hyperbolic-quarter-turn" => Family::Case(3),
            "case-4" | "hyperbolic-equal-angle" => Family::Case(4),
            "case-5" | "elliptic-distinct" => Family::Case(5),
            "case-6" | "elliptic-equal" => Family::Case(6),
            "case-7" | "elliptic-pi-pair" => Family::Case(7),
            "case-8" | "parabolic" => Family::Case(8),
            "parabolic-axis" | "parabolic-real" => Family::ParabolicAxis,
            "parabolic-half-turn" => Family::ParabolicHalfTurn,
            "hyperbolic-axis" => Family::HyperbolicAxis,
            "central" => Family::Central,
            "involution" => Family::Involution,
            "skew-involution" => Family::SkewInvolution,
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        Ok(fam)
    }
}

/// Knobs for the matrix generator.
#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Upper bound on the condition number of the conjugating matrix.
    pub cond_bound: f64,
    /// Margin kept from every predicate boundary in parameter space; must
    /// stay well above classification tolerances.
    pub margin: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { cond_bound: 20.0, margin: 0.02 }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Modulus parameter bounded away from 1.
fn sample_modulus(rng: &mut ChaCha8Rng, margin: f64) -> f64 {
    let lo = (1.0 + 10.0 * margin).ln();
    let hi = 2.5f64.ln();
    uniform(rng, lo, hi).exp()
}

/// Interior angle, `margin` away from 0 and pi.
fn interior_angle(rng: &mut ChaCha8Rng, margin: f64) -> f64 {
    uniform(rng, margin, PI - margin)
}

/// Interior angle also bounded away from pi/2.
fn interior_angle_off_half(rng: &mut ChaCha8Rng, margin: f64) -> f64 {
    loop {
        let t = interior_angle(rng, margin);
        if (t - FRAC_PI_2).abs() >= margin {
            return t;
        }
    }
}

/// Angle pair with `|theta - phi|`, `|theta + phi - pi|` and the cosine gap
/// all at least `margin`.
fn separated_angle_pair(rng: &mut ChaCha8Rng, margin: f64) -> (f64, f64) {
    loop {
        let t = interior_angle(rng, margin);
        let p = interior_angle(rng, margin);
        if (t - p).abs() >= margin
            && (t + p - PI).abs() >= margin
            && (t.cos() - p.cos()).abs() >= margin / 2.0
            && (t.cos() + p.cos()).abs() >= margin / 2.0
        {
            return (t, p);
        }
    }
}

/// Draws normal-form parameters for a family, margins included.
pub fn sample_form(family: Family, rng: &mut ChaCha8Rng, margin: f64) -> NormalForm {
    match family {
        Family::Case(1) => {
            let r = sample_modulus(rng, margin);
            let (theta, phi) = separated_angle_pair(rng, margin);
            NormalForm::Diagonal { r, theta, phi }
        }
        Family::Case(2) => {
            let r = sample_modulus(rng, margin);
            let theta = interior_angle_off_half(rng, margin);
            NormalForm::Diagonal { r, theta, phi: PI - theta }
        }
        Family::Case(3) => {
            let r = sample_modulus(rng, margin);
            NormalForm::Diagonal { r, theta: FRAC_PI_2, phi: FRAC_PI_2 }
        }
        Family::Case(4) => {
            let r = sample_modulus(rng, margin);
            let theta = interior_angle_off_half(rng, margin);
            NormalForm::Diagonal { r, theta, phi: theta }
        }
        Family::Case(5) => {
            let (theta, phi) = separated_angle_pair(rng, margin);
            let (theta, phi) = if theta <= phi { (theta, phi) } else { (phi, theta) };
            NormalForm::Diagonal { r: 1.0, theta, phi }
        }
        Family::Case(6) => {
            let theta = interior_angle_off_half(rng, margin);
            NormalForm::Diagonal { r: 1.0, theta, phi: theta }
        }
        Family::Case(7) => {
            let theta = uniform(rng, margin, FRAC_PI_2 - margin);
            NormalForm::Diagonal { r: 1.0, theta, phi: PI - theta }
        }
        Family::Case(8) => {
            let theta = loop {
                let t = interior_angle(rng, margin);
                if (t - FRAC_PI_2).abs() >= margin {
                    break t;
                }
            };
            NormalForm::Parabolic { theta }
        }
        Family::Case(k) => unreachable!("case id {k} out of range"),
        Family::ParabolicAxis => {
            let theta = if rng.gen::<bool>() { 0.0 } else { PI };
            NormalForm::Parabolic { theta }
        }
        Family::ParabolicHalfTurn => NormalForm::Parabolic { theta: FRAC_PI_2 },
        Family::HyperbolicAxis => {
            let r = sample_modulus(rng, margin);
            let theta = if rng.gen::<bool>() { 0.0 } else { PI };
            NormalForm::Diagonal { r, theta, phi: theta }
        }
        Family::Central => {
            let theta = if rng.gen::<bool>() { 0.0 } else { PI };
            NormalForm::Diagonal { r: 1.0, theta, phi: theta }
        }
        Family::Involution => NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: PI },
        Family::SkewInvolution => {
            NormalForm::Diagonal { r: 1.0, theta: FRAC_PI_2, phi: FRAC_PI_2 }
        }
    }
}

pub fn random_unit_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let q = Quaternion::new(
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
        );
        let n = q.norm();
        if n > 1e-2 {
            return q / n;
        }
    }
}

fn random_bounded_quaternion(rng: &mut ChaCha8Rng, bound: f64) -> Quaternion {
    Quaternion::new(
        uniform(rng, -bound, bound),
        uniform(rng, -bound, bound),
        uniform(rng, -bound, bound),
        uniform(rng, -bound, bound),
    )
}

fn random_unit_complex(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::unit_complex(uniform(rng, -PI, PI))
}

/// Condition number of the embedding of `s`.
pub fn condition_number(s: &QMatrix2) -> Result<f64> {
    let svd = svd4(&s.phi_matrix(), false)?;
    let (mut smin, mut smax) = (f64::INFINITY, 0.0f64);
    for &sv in svd.singular_values.iter() {
        smin = smin.min(sv);
        smax = smax.max(sv);
    }
    if smin <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(smax / smin)
}

/// Random element of SL(2,H) with condition number at most `cond_bound`,
/// assembled from unit-quaternion diagonals and bounded unipotent shears
/// (each factor has unit quaternionic determinant by construction).
pub fn sample_conjugator(rng: &mut ChaCha8Rng, cond_bound: f64) -> QMatrix2 {
    let mut shear = 0.8f64;
    loop {
        let diag = QMatrix2::diagonal(random_unit_quaternion(rng), random_unit_quaternion(rng));
        let upper =
            QMatrix2::new(quat::ONE, random_bounded_quaternion(rng, shear), quat::ZERO, quat::ONE);
        let lower =
            QMatrix2::new(quat::ONE, quat::ZERO, random_bounded_quaternion(rng, shear), quat::ONE);
        let s = diag * upper * lower;
        if condition_number(&s).map(|c| c <= cond_bound).unwrap_or(false) {
            // clean the rounding residue off the determinant
            if let Ok(s) = s.sl_normalize() {
                return s;
            }
        }
        shear *= 0.7;
    }
}

/// A matrix from the family together with the normal form it was built
/// from: `S N S^-1` for a random conjugator `S`.
pub fn sample_matrix(
    family: Family,
    rng: &mut ChaCha8Rng,
    cfg: &SampleConfig,
) -> Result<(QMatrix2, NormalForm)> {
    let form = sample_form(family, rng, cfg.margin);
    let s = sample_conjugator(rng, cfg.cond_bound);
    let a = form.materialize().conjugate_by(&s)?;
    Ok((a, form))
}

/// Random unit-scale GL(2,H) matrix (no determinant normalization); used by
/// the embedding-level checks.
pub fn sample_gl(rng: &mut ChaCha8Rng) -> QMatrix2 {
    QMatrix2::new(
        random_bounded_quaternion(rng, 1.5),
        random_bounded_quaternion(rng, 1.5),
        random_bounded_quaternion(rng, 1.5),
        random_bounded_quaternion(rng, 1.5),
    )
}

/// Random element of the centralizer of the canonical form, drawn from the
/// parametrized tables and normalized into SL(2,H).
pub fn sample_centralizer(form: &NormalForm, rng: &mut ChaCha8Rng, tol: f64) -> Result<QMatrix2> {
    let axis = |t: f64| t <= tol || (PI - t).abs() <= tol;
    let g = match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            let unit = (r - 1.0).abs() <= tol;
            let equal = (theta - phi).abs() <= tol;
            if unit && equal && axis(theta) {
                // +-I: the centralizer is the whole group
                sample_conjugator(rng, 20.0)
            } else if unit && equal {
                // full complex-entry matrices
                loop {
                    let g = QMatrix2::new(
                        random_unit_complex(rng) * uniform(rng, 0.5, 2.0),
                        random_unit_complex(rng) * uniform(rng, 0.0, 1.0),
                        random_unit_complex(rng) * uniform(rng, 0.0, 1.0),
                        random_unit_complex(rng) * uniform(rng, 0.5, 2.0),
                    );
                    if g.det_h()? > 1e-3 {
                        break g.sl_normalize()?;
                    }
                }
            } else {
                // diagonal; complex on interior-angle slots, free on axis
                let a = if axis(theta) {
                    random_unit_quaternion(rng)
                } else {
                    random_unit_complex(rng)
                };
                let b =
                    if axis(phi) { random_unit_quaternion(rng) } else { random_unit_complex(rng) };
                let scale = uniform(rng, 0.5, 2.0);
                QMatrix2::diagonal(a * scale, b * (1.0 / scale)).sl_normalize()?
            }
        }
        NormalForm::Parabolic { theta } => {
            let a = if axis(theta) { random_unit_quaternion(rng) } else { random_unit_complex(rng) };
            let b = if axis(theta) {
                random_bounded_quaternion(rng, 1.0)
            } else {
                random_unit_complex(rng) * uniform(rng, 0.0, 1.0)
            };
            QMatrix2::new(a, b, quat::ZERO, a).sl_normalize()?
        }
    };
    Ok(g)
}

/// Random element of the reverser set of the canonical form (`g N g^-1 =
/// N^-1`); `None` when the form is not reversible in SL(2,H).
pub fn sample_reverser_set(
    form: &NormalForm,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Option<QMatrix2>> {
    let axis = |t: f64| t <= tol || (PI - t).abs() <= tol;
    let j = quat::J;
    let g = match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            let unit = (r - 1.0).abs() <= tol;
            let equal = (theta - phi).abs() <= tol;
            if unit && equal && axis(theta) {
                // +-I: every element reverses
                Some(sample_conjugator(rng, 20.0))
            } else if unit && equal {
                // (a j, b j; c j, d j) = M diag(j, j) for complex M
                loop {
                    let m = QMatrix2::new(
                        random_unit_complex(rng) * uniform(rng, 0.5, 2.0),
                        random_unit_complex(rng) * uniform(rng, 0.0, 1.0),
                        random_unit_complex(rng) * uniform(rng, 0.0, 1.0),
                        random_unit_complex(rng) * uniform(rng, 0.5, 2.0),
                    );
                    if m.det_h()? > 1e-3 {
                        break Some((m * QMatrix2::diagonal(j, j)).sl_normalize()?);
                    }
                }
            } else if unit {
                let a = if axis(theta) { random_unit_quaternion(rng) } else { random_unit_complex(rng) * j };
                let b = if axis(phi) { random_unit_quaternion(rng) } else { random_unit_complex(rng) * j };
                let scale = uniform(rng, 0.5, 2.0);
                Some(QMatrix2::diagonal(a * scale, b * (1.0 / scale)).sl_normalize()?)
            } else if equal {
                let a = if axis(theta) { random_unit_quaternion(rng) } else { random_unit_complex(rng) * j };
                let b = if axis(theta) { random_unit_quaternion(rng) } else { random_unit_complex(rng) * j };
                let scale = uniform(rng, 0.5, 2.0);
                Some(QMatrix2::anti_diagonal(a * scale, b * (1.0 / scale)).sl_normalize()?)
            } else {
                None
            }
        }
        NormalForm::Parabolic { theta } => {
            let (z, w) = if axis(theta) {
                (random_unit_quaternion(rng), random_bounded_quaternion(rng, 1.0))
            } else {
                (
                    random_unit_complex(rng),
                    random_unit_complex(rng) * uniform(rng, 0.0, 1.0),
                )
            };
            let rot = Quaternion::unit_complex(-2.0 * theta);
            Some(
                QMatrix2::new(-(rot * z * j), w * j, quat::ZERO, z * j).sl_normalize()?,
            )
        }
    };
    Ok(g)
}

/// Random element conjugating the canonical form to its negated inverse;
/// `None` when that set is empty.
pub fn sample_neg_reverser_set(
    form: &NormalForm,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Option<QMatrix2>> {
    let axis = |t: f64| t <= tol || (PI - t).abs() <= tol;
    let g = match *form {
        NormalForm::Diagonal { r, theta, phi } => {
            if (theta + phi - PI).abs() > tol {
                None
            } else if (r - 1.0).abs() <= tol && (theta - FRAC_PI_2).abs() <= tol {
                // diag(i, i): the set is the full complex centralizer
                Some(sample_centralizer(form, rng, tol)?)
            } else {
                let (a, c) = if axis(theta) {
                    (random_unit_quaternion(rng), random_unit_quaternion(rng))
                } else {
                    (random_unit_complex(rng), random_unit_complex(rng))
                };
                let scale = uniform(rng, 0.5, 2.0);
                Some(QMatrix2::anti_diagonal(a * scale, c * (-1.0 / scale)).sl_normalize()?)
            }
        }
        NormalForm::Parabolic { theta } => {
            if (theta - FRAC_PI_2).abs() > tol {
                None
            } else {
                let a = random_unit_complex(rng);
                let b = random_unit_complex(rng) * uniform(rng, 0.0, 1.0);
                Some(QMatrix2::new(a, b, quat::ZERO, -a).sl_normalize()?)
            }
        }
    };
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reversibility::{extended_centralizer_membership, MembershipVerdict};

    #[test]
    fn family_names_round_trip() {
        for fam in Family::all() {
            let parsed: Family = fam.name().parse().unwrap();
            assert_eq!(parsed, fam);
        }
        assert!(matches!("case-9".parse::<Family>(), Err(Error::UnknownFamily(_))));
        assert_eq!("parabolic".parse::<Family>().unwrap(), Family::Case(8));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SampleConfig::default();
        let mut rng1 = rng_from_seed(7);
        let mut rng2 = rng_from_seed(7);
        for fam in Family::all() {
            let (a1, f1) = sample_matrix(fam, &mut rng1, &cfg).unwrap();
            let (a2, f2) = sample_matrix(fam, &mut rng2, &cfg).unwrap();
            assert_eq!(a1, a2);
            assert_eq!(f1, f2);
        }
    }

    #[test]
    fn conjugators_are_unit_determinant_and_conditioned() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let s = sample_conjugator(&mut rng, 20.0);
            assert!((s.det_h().unwrap() - 1.0).abs() < 1e-10);
            assert!(condition_number(&s).unwrap() <= 20.0);
        }
    }

    #[test]
    fn sampled_matrices_have_unit_determinant() {
        let cfg = SampleConfig::default();
        let mut rng = rng_from_seed(3);
        for fam in Family::all() {
            let (a, _) = sample_matrix(fam, &mut rng, &cfg).unwrap();
            assert!(
                (a.det_h().unwrap() - 1.0).abs() < 1e-9,
                "family {fam:?} determinant {}",
                a.det_h().unwrap()
            );
        }
    }

    #[test]
    fn table_samples_land_in_their_sets() {
        let tol = 1e-8;
        let mut rng = rng_from_seed(5);
        let forms = [
            NormalForm::Diagonal { r: 1.0, theta: 0.8, phi: 0.8 },
            NormalForm::Diagonal { r: 1.0, theta: 0.3, phi: 2.0 },
            NormalForm::Diagonal { r: 1.7, theta: 1.1, phi: 1.1 },
            NormalForm::Diagonal { r: 1.7, theta: 0.0, phi: 0.0 },
            NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: PI },
            NormalForm::Parabolic { theta: 1.3 },
            NormalForm::Parabolic { theta: 0.0 },
        ];
        for form in forms {
            let n = form.materialize();
            for _ in 0..5 {
                let z = sample_centralizer(&form, &mut rng, tol).unwrap();
                assert_eq!(
                    extended_centralizer_membership(&n, &z, tol).unwrap(),
                    MembershipVerdict::Centralizer,
                    "centralizer sample failed for {form:?}"
                );
                if let Some(g) = sample_reverser_set(&form, &mut rng, tol).unwrap() {
                    let verdict = extended_centralizer_membership(&n, &g, tol).unwrap();
                    // for involutions the centralizer and reverser coincide
                    assert!(
                        matches!(
                            verdict,
                            MembershipVerdict::Reverser | MembershipVerdict::Centralizer
                        ),
                        "reverser sample failed for {form:?}: {verdict:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn neg_reverser_samples_conjugate_to_negated_inverse() {
        let tol = 1e-8;
        let mut rng = rng_from_seed(9);
        let forms = [
            NormalForm::Diagonal { r: 1.0, theta: 0.7, phi: PI - 0.7 },
            NormalForm::Diagonal { r: 2.0, theta: 0.4, phi: PI - 0.4 },
            NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: PI },
            NormalForm::Parabolic { theta: FRAC_PI_2 },
        ];
        for form in forms {
            let n = form.materialize();
            let target = -n.inverse().unwrap();
            for _ in 0..5 {
                let g = sample_neg_reverser_set(&form, &mut rng, tol)
                    .unwrap()
                    .expect("these forms all conjugate to the negated inverse");
                let conj = g * n * g.inverse().unwrap();
                assert!(
                    conj.approx_eq(&target, 1e-8),
                    "neg-reverser sample failed for {form:?}"
                );
            }
        }
        let off = NormalForm::Diagonal { r: 1.7, theta: 0.4, phi: 0.4 };
        assert!(sample_neg_reverser_set(&off, &mut rng, tol).unwrap().is_none());
    }
}
