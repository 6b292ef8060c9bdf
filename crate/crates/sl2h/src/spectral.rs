//! Eigenvalue classes, diagonalizability and conjugacy normal forms.
//!
//! Right eigenvalues of a quaternionic matrix come in similarity classes;
//! the four eigenvalues of the embedding `Phi(A)` split into conjugate
//! pairs, and each pair collapses to one [`ClassRep`]. Every element of
//! SL(2,H) is conjugate to a canonical representative: either
//! `diag(r e^{i theta}, r^-1 e^{i phi})` or the parabolic block
//! `(e^{i theta} 1; 0 e^{i theta})`. [`normal_form`] computes that
//! representative together with an explicit conjugating matrix of unit
//! quaternionic determinant.
//!
//! Numerical caveat: eigenvalues of a defective (parabolic) matrix are only
//! computable to O(sqrt(eps)), so class clustering never uses a radius below
//! [`crate::tol::CLUSTER_FLOOR`]. Cluster centroids cancel the leading error
//! term, which keeps class representatives and witnesses accurate. Right at
//! the diagonalizable/parabolic boundary the verdict is threshold-dependent;
//! the samplers in [`crate::sample`] keep generated matrices away from it.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::QMatrix2;
use crate::quat::{ClassRep, Quaternion};

type CMat4 = Matrix4<Complex64>;
type CVec4 = Vector4<Complex64>;

/// One eigenvalue similarity class with its quaternionic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralClass {
    pub class: ClassRep,
    pub multiplicity: usize,
}

/// The eigenvalue classes of a matrix; multiplicities sum to 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    pub classes: Vec<SpectralClass>,
}

impl EigenSpectrum {
    /// Classes sorted by descending modulus, ties by ascending angle.
    fn sorted(mut classes: Vec<SpectralClass>) -> Self {
        classes.sort_by(|a, b| {
            b.class
                .modulus
                .partial_cmp(&a.class.modulus)
                .unwrap()
                .then(a.class.angle.partial_cmp(&b.class.angle).unwrap())
        });
        Self { classes }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.classes.iter().map(|c| c.multiplicity).sum()
    }

    pub fn find(&self, class: ClassRep, tol: f64) -> Option<&SpectralClass> {
        self.classes.iter().find(|c| c.class.approx_eq(class, tol))
    }

    /// Multiset equality of classes within `tol`.
    pub fn matches(&self, other: &EigenSpectrum, tol: f64) -> bool {
        if self.classes.len() != other.classes.len() {
            return false;
        }
        let mut used = vec![false; other.classes.len()];
        'outer: for c in &self.classes {
            for (i, o) in other.classes.iter().enumerate() {
                if !used[i] && c.multiplicity == o.multiplicity && c.class.approx_eq(o.class, tol) {
                    used[i] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// The spectrum of the inverse matrix.
    pub fn inverse(&self) -> Result<EigenSpectrum> {
        let classes = self
            .classes
            .iter()
            .map(|c| Ok(SpectralClass { class: c.class.inverse()?, multiplicity: c.multiplicity }))
            .collect::<Result<_>>()?;
        Ok(Self::sorted(classes))
    }

    /// The spectrum of the negated inverse matrix.
    pub fn neg_inverse(&self) -> Result<EigenSpectrum> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(SpectralClass { class: c.class.neg_inverse()?, multiplicity: c.multiplicity })
            })
            .collect::<Result<_>>()?;
        Ok(Self::sorted(classes))
    }

    /// True when the class multiset equals that of the inverse.
    pub fn is_inverse_closed(&self, tol: f64) -> bool {
        self.inverse().map(|inv| self.matches(&inv, tol)).unwrap_or(false)
    }

    /// True when the class multiset equals that of the negated inverse.
    pub fn matches_neg_inverse(&self, tol: f64) -> bool {
        self.neg_inverse().map(|n| self.matches(&n, tol)).unwrap_or(false)
    }
}

/// Canonical conjugacy representative.
///
/// `Diagonal` stands for `diag(r e^{i theta}, r^-1 e^{i phi})` with `r >= 1`
/// and `theta <= phi` whenever `r = 1`; `Parabolic` stands for
/// `(e^{i theta} 1; 0 e^{i theta})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormalForm {
    Diagonal { r: f64, theta: f64, phi: f64 },
    Parabolic { theta: f64 },
}

impl NormalForm {
    /// The representative as a concrete matrix.
    pub fn materialize(&self) -> QMatrix2 {
        match *self {
            NormalForm::Diagonal { r, theta, phi } => QMatrix2::diagonal(
                Quaternion::unit_complex(theta).scale(r),
                Quaternion::unit_complex(phi).scale(1.0 / r),
            ),
            NormalForm::Parabolic { theta } => QMatrix2::parabolic(theta),
        }
    }

    pub fn approx_eq(&self, other: &NormalForm, tol: f64) -> bool {
        match (*self, *other) {
            (
                NormalForm::Diagonal { r, theta, phi },
                NormalForm::Diagonal { r: r2, theta: t2, phi: p2 },
            ) => (r - r2).abs() <= tol && (theta - t2).abs() <= tol && (phi - p2).abs() <= tol,
            (NormalForm::Parabolic { theta }, NormalForm::Parabolic { theta: t2 }) => {
                (theta - t2).abs() <= tol
            }
            _ => false,
        }
    }
}

/// A matrix `S` in SL(2,H) with `S N S^-1 = A` for the normal form `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyWitness {
    pub s: QMatrix2,
}

impl ConjugacyWitness {
    /// Residual `max(|S N S^-1 - A|_inf, |det_H(S) - 1|)`.
    pub fn residual(&self, form: &NormalForm, a: &QMatrix2) -> Result<f64> {
        let reconstructed = form.materialize().conjugate_by(&self.s)?;
        let det_err = (self.s.det_h()? - 1.0).abs();
        Ok(reconstructed.distance_inf(a).max(det_err))
    }
}

/// Clustering radius: never below the defective-eigenvalue noise floor.
pub(crate) fn cluster_radius(tol: f64, scale: f64) -> f64 {
    tol.max(crate::tol::CLUSTER_FLOOR * scale.max(1.0))
}

type Svd4 = nalgebra::linalg::SVD<Complex64, nalgebra::U4, nalgebra::U4>;

/// SVD with a bounded iteration count; nalgebra's default iterates without
/// limit, which must never reach library users.
pub(crate) fn svd4(m: &CMat4, compute_u: bool) -> Result<Svd4> {
    nalgebra::linalg::SVD::try_new(*m, compute_u, true, 1e-14, 5000)
        .ok_or_else(|| Error::InternalInconsistency("SVD iteration did not converge".into()))
}

/// Computes the eigenvalue classes of `A` by clustering the four
/// eigenvalues of `Phi(A)` into conjugate groups.
///
/// Each class of quaternionic multiplicity `m` contributes exactly `2m`
/// eigenvalues of the embedding, so every cluster of upper-half-plane
/// images must have even size; an odd cluster means the conjugate pairing
/// is not resolvable and yields [`Error::ClusteringAmbiguity`].
pub fn eigenvalue_classes(a: &QMatrix2, tol: f64) -> Result<EigenSpectrum> {
    let evs = a.phi().eigenvalues()?;
    let scale = evs.iter().map(|e| e.norm()).fold(1.0f64, f64::max);
    let radius = cluster_radius(tol, scale);
    cluster_into_classes(&evs, radius)
}

fn cluster_into_classes(evs: &[Complex64; 4], radius: f64) -> Result<EigenSpectrum> {
    // Map eigenvalues to the closed upper half plane; conjugate pairs land
    // on the same point.
    let pts: Vec<Complex64> = evs.iter().map(|e| Complex64::new(e.re, e.im.abs())).collect();
    let mut component = [usize::MAX; 4];
    let mut next = 0;
    for i in 0..4 {
        if component[i] != usize::MAX {
            continue;
        }
        component[i] = next;
        let mut frontier = vec![i];
        while let Some(p) = frontier.pop() {
            for q in 0..4 {
                if component[q] == usize::MAX && (pts[p] - pts[q]).norm() <= radius {
                    component[q] = next;
                    frontier.push(q);
                }
            }
        }
        next += 1;
    }
    let mut classes = Vec::new();
    for comp in 0..next {
        let members: Vec<Complex64> =
            (0..4).filter(|&i| component[i] == comp).map(|i| pts[i]).collect();
        if members.len() % 2 != 0 {
            return Err(Error::ClusteringAmbiguity { tol: radius });
        }
        let mut centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        // Folding into the upper half plane biases the centroid of a real
        // class upward by the mean |Im| noise; snap unresolvably small
        // imaginary parts back to the axis.
        if centroid.im.abs() <= radius {
            centroid.im = 0.0;
        }
        classes.push(SpectralClass {
            class: ClassRep::from_complex(centroid),
            multiplicity: members.len() / 2,
        });
    }
    Ok(EigenSpectrum::sorted(classes))
}

/// True when every eigenvalue of `Phi(A)` has geometric multiplicity equal
/// to its algebraic multiplicity. Geometric multiplicities are nullities of
/// `Phi(A) - lambda I` with singular values below `tol * sigma_max` counted
/// as zero.
pub fn is_diagonalizable(a: &QMatrix2, tol: f64) -> bool {
    let m = a.phi_matrix();
    let Ok(spectrum) = eigenvalue_classes(a, tol) else {
        // unresolvable conjugate pairing: almost defective
        return false;
    };
    let scale = spectrum.classes.iter().map(|c| c.class.modulus).fold(1.0f64, f64::max);
    let radius = cluster_radius(tol, scale);
    for sc in &spectrum.classes {
        let lambda = sc.class.as_complex();
        // a real class contributes 2m copies of the same real eigenvalue
        let real = lambda.im.abs() <= radius;
        let algebraic = if real { 2 * sc.multiplicity } else { sc.multiplicity };
        let shifted = m - CMat4::identity() * lambda;
        if nullity(&shifted, tol, m.norm()) < algebraic {
            return false;
        }
    }
    true
}

/// Number of singular values of `m` below `rel_tol` times the larger of
/// `m`'s top singular value and `scale_floor`. The floor keeps the rank
/// decision meaningful when `m` itself is all rounding noise (shifting a
/// scalar matrix by its own eigenvalue).
fn nullity(m: &CMat4, rel_tol: f64, scale_floor: f64) -> usize {
    let Ok(svd) = svd4(m, false) else { return 0 };
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(scale_floor, |acc, s| acc.max(*s));
    sv.iter().filter(|&&s| s <= rel_tol * smax).count()
}

/// Canonical null-space basis of `m`: singular vectors below
/// `rel_tol * sigma_max`, reduced to row echelon form so the basis depends
/// only on the subspace, not on SVD phase conventions.
fn null_space_basis(m: &CMat4, rel_tol: f64) -> Vec<CVec4> {
    let Ok(svd) = svd4(m, false) else { return Vec::new() };
    let vt = svd.v_t.expect("SVD of a 4x4 matrix always yields V^H");
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let mut rows: Vec<CVec4> = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= rel_tol * smax {
            rows.push(vt.row(i).adjoint());
        }
    }
    rref(rows)
}

/// Reduced row echelon form over the complex numbers; unique for a given
/// row space under largest-pivot selection.
fn rref(mut rows: Vec<CVec4>) -> Vec<CVec4> {
    let mut rank = 0;
    for col in 0..4 {
        if rank == rows.len() {
            break;
        }
        let (best, mag) = (rank..rows.len())
            .map(|r| (r, rows[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if mag < 1e-10 {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank][col];
        rows[rank] /= pivot;
        for r in 0..rows.len() {
            if r != rank {
                let factor = rows[r][col];
                let lead = rows[rank];
                rows[r] -= lead * factor;
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Maps a vector of the embedded space back to a quaternionic 2-vector: the
/// column `(v1; -conj(v2))` corresponds to `v = v1 + v2 j`.
pub(crate) fn quaternion_vector(u: &CVec4) -> (Quaternion, Quaternion) {
    (
        Quaternion::from_complex_parts(u[0], -u[2].conj()),
        Quaternion::from_complex_parts(u[1], -u[3].conj()),
    )
}

pub(crate) fn embed_vector(v: (Quaternion, Quaternion)) -> CVec4 {
    let (a1, a2) = v.0.complex_parts();
    let (b1, b2) = v.1.complex_parts();
    CVec4::new(a1, b1, -a2.conj(), -b2.conj())
}

/// Right-multiplies an eigenvector by a unit complex number so that the
/// dominant complex part of its largest component becomes real positive.
/// This fixes the gauge freedom `v -> v w`, making witnesses deterministic
/// and canonical forms map to themselves with witness `I`.
fn gauge(v: (Quaternion, Quaternion)) -> (Quaternion, Quaternion) {
    let pivot = if v.0.norm() >= v.1.norm() { v.0 } else { v.1 };
    if pivot.norm() < 1e-14 {
        return v;
    }
    let (z1, z2) = pivot.complex_parts();
    let omega = if z1.norm() >= z2.norm() { z1.conj() / z1.norm() } else { z2 / z2.norm() };
    let w = Quaternion::from_complex(omega);
    (v.0 * w, v.1 * w)
}

fn normalize(v: (Quaternion, Quaternion)) -> (Quaternion, Quaternion) {
    let n = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
    (v.0 / n, v.1 / n)
}

/// One corrective least-squares step: removes the component of the residual
/// `(M - lambda I) u` that lies in the range of `M - lambda I`.
fn refine_null_vector(m: &CMat4, lambda: Complex64, u: CVec4, rel_tol: f64) -> CVec4 {
    let shifted = m - CMat4::identity() * lambda;
    let Ok(svd) = svd4(&shifted, true) else { return u };
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let residual = shifted * u;
    match svd.solve(&residual, rel_tol * smax.max(f64::MIN_POSITIVE)) {
        Ok(correction) => {
            let refined = u - correction;
            let n = refined.norm();
            if n > 1e-8 {
                refined / Complex64::new(n, 0.0)
            } else {
                u
            }
        }
        Err(_) => u,
    }
}

/// Right eigenvectors of `A` for a given class, recovered from the null
/// space of `Phi(A) - lambda I` and mapped back through the complex split.
/// Returns `count` quaternionically independent eigenvectors.
pub(crate) fn class_eigenvectors(
    a: &QMatrix2,
    lambda: Complex64,
    count: usize,
    rel_tol: f64,
) -> Result<Vec<(Quaternion, Quaternion)>> {
    let m = a.phi_matrix();
    let shifted = m - CMat4::identity() * lambda;
    let basis = null_space_basis(&shifted, rel_tol);
    if basis.is_empty() {
        return Err(Error::NotAnEigenclass {
            modulus: lambda.norm(),
            angle: lambda.im.abs().atan2(lambda.re),
        });
    }
    let mut out = Vec::with_capacity(count);
    for u in basis.iter().take(count) {
        let refined = refine_null_vector(&m, lambda, *u, rel_tol);
        out.push(normalize(gauge(quaternion_vector(&refined))));
    }
    // A real eigenvalue has a doubled complex eigenspace that maps onto a
    // single quaternionic line; synthesize further independent vectors by a
    // right multiplication when the basis runs short.
    while out.len() < count {
        let (v1, v2) = out[out.len() - 1];
        out.push((v1 * crate::quat::J, v2 * crate::quat::J));
    }
    Ok(out)
}

/// Right eigenvector `v = (v1, v2)` with `A v = v lambda`, `|v| = 1`, where
/// `lambda` is the class representative.
pub fn right_eigenvector(
    a: &QMatrix2,
    class: ClassRep,
    tol: f64,
) -> Result<(Quaternion, Quaternion)> {
    let spectrum = eigenvalue_classes(a, tol)?;
    let scale = spectrum.classes.iter().map(|c| c.class.modulus).fold(1.0f64, f64::max);
    let matched = spectrum
        .find(class, cluster_radius(tol, scale))
        .ok_or(Error::NotAnEigenclass { modulus: class.modulus, angle: class.angle })?;
    let lambda = matched.class.as_complex();
    let v = class_eigenvectors(a, lambda, 1, tol.max(1e-10))?[0];
    let residual = eigen_residual(a, v, lambda);
    let limit = tol.max(1e-9 * scale);
    if residual > limit {
        return Err(Error::NumericalBreakdown { residual, limit });
    }
    Ok(v)
}

pub(crate) fn eigen_residual(
    a: &QMatrix2,
    v: (Quaternion, Quaternion),
    lambda: Complex64,
) -> f64 {
    let l = Quaternion::from_complex(lambda);
    let r1 = a.a * v.0 + a.b * v.1 - v.0 * l;
    let r2 = a.c * v.0 + a.d * v.1 - v.1 * l;
    (r1.norm_sqr() + r2.norm_sqr()).sqrt()
}

/// Computes the canonical conjugacy representative of `A` together with a
/// witness `S` in SL(2,H) satisfying `S N S^-1 = A`.
pub fn normal_form(a: &QMatrix2, tol: f64) -> Result<(NormalForm, ConjugacyWitness)> {
    a.require_unit_det(tol.max(crate::tol::SPECTRAL))?;
    let identity = QMatrix2::identity();
    // Central elements first: their eigenvector machinery is degenerate.
    if a.approx_eq(&identity, tol) {
        return Ok((
            NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: 0.0 },
            ConjugacyWitness { s: identity },
        ));
    }
    if a.approx_eq(&-identity, tol) {
        let pi = std::f64::consts::PI;
        return Ok((
            NormalForm::Diagonal { r: 1.0, theta: pi, phi: pi },
            ConjugacyWitness { s: identity },
        ));
    }

    let spectrum = eigenvalue_classes(a, tol)?;
    let diagonalizable = is_diagonalizable(a, tol);
    let rel_tol = tol.max(1e-10);

    let (form, s0) = if !diagonalizable {
        parabolic_form(a, &spectrum, tol, rel_tol)?
    } else {
        diagonal_form(a, &spectrum, tol, rel_tol)?
    };

    let det = s0.det_h()?;
    if det <= 1e-9 {
        return Err(Error::NumericalBreakdown { residual: det, limit: 1e-9 });
    }
    let s = s0.scale(det.powf(-0.25));
    let witness = ConjugacyWitness { s };
    let residual = witness.residual(&form, a)?;
    if residual > crate::tol::WITNESS_LIMIT {
        return Err(Error::NumericalBreakdown { residual, limit: crate::tol::WITNESS_LIMIT });
    }
    Ok((form, witness))
}

fn parabolic_form(
    a: &QMatrix2,
    spectrum: &EigenSpectrum,
    tol: f64,
    rel_tol: f64,
) -> Result<(NormalForm, QMatrix2)> {
    let scale = spectrum.classes.iter().map(|c| c.class.modulus).fold(1.0f64, f64::max);
    let radius = cluster_radius(tol, scale);
    let class = match spectrum.classes.as_slice() {
        [only] => only.class,
        [c1, c2] => {
            // A non-diagonalizable verdict with two resolved classes can only
            // happen right at the threshold; merge when they are adjacent.
            if (c1.class.as_complex() - c2.class.as_complex()).norm() <= 10.0 * radius {
                ClassRep::from_complex((c1.class.as_complex() + c2.class.as_complex()) / 2.0)
            } else {
                return Err(Error::InternalInconsistency(
                    "non-diagonalizable matrix with two separated eigenvalue classes".into(),
                ));
            }
        }
        _ => {
            return Err(Error::InternalInconsistency(
                "eigenvalue classes of a 2x2 matrix must number 1 or 2".into(),
            ))
        }
    };
    if (class.modulus - 1.0).abs() > 10.0 * radius.max(tol) {
        return Err(Error::InternalInconsistency(format!(
            "parabolic eigenvalue class has non-unit modulus {}",
            class.modulus
        )));
    }
    let theta = class.angle;
    let lambda = Complex64::from_polar(1.0, theta);
    let m = a.phi_matrix();
    let shifted = m - CMat4::identity() * lambda;
    let basis = null_space_basis(&shifted, rel_tol);
    if basis.is_empty() {
        return Err(Error::InternalInconsistency(
            "parabolic matrix with empty eigenspace".into(),
        ));
    }
    let v = gauge(quaternion_vector(&basis[0]));
    let u = embed_vector(v);
    // generalized eigenvector: solve (Phi - lambda I) y = u
    let svd = svd4(&shifted, true)?;
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let y = svd
        .solve(&u, rel_tol * smax)
        .map_err(|_| Error::InternalInconsistency("generalized eigenvector solve failed".into()))?;
    let solve_residual = (shifted * y - u).norm();
    if solve_residual > crate::tol::WITNESS_LIMIT * (1.0 + u.norm()) {
        return Err(Error::NumericalBreakdown {
            residual: solve_residual,
            limit: crate::tol::WITNESS_LIMIT,
        });
    }
    let w = quaternion_vector(&y);
    let s0 = QMatrix2::new(v.0, w.0, v.1, w.1);
    Ok((NormalForm::Parabolic { theta }, s0))
}

fn diagonal_form(
    a: &QMatrix2,
    spectrum: &EigenSpectrum,
    tol: f64,
    rel_tol: f64,
) -> Result<(NormalForm, QMatrix2)> {
    match spectrum.classes.as_slice() {
        [c1, c2] => {
            let (m1, m2) = (c1.class.modulus, c2.class.modulus);
            // symmetrize against determinant noise: the two moduli multiply to 1
            let r = (m1 / m2).sqrt();
            let (first, second, r) = if (r - 1.0).abs() <= tol.max(1e-12) {
                // unit-modulus pair: canonical order is by angle
                if c1.class.angle <= c2.class.angle {
                    (c1.class, c2.class, 1.0)
                } else {
                    (c2.class, c1.class, 1.0)
                }
            } else {
                // classes arrive sorted by descending modulus
                (c1.class, c2.class, r)
            };
            let v = class_eigenvectors(a, first.as_complex(), 1, rel_tol)?[0];
            let w = class_eigenvectors(a, second.as_complex(), 1, rel_tol)?[0];
            let s0 = QMatrix2::new(v.0, w.0, v.1, w.1);
            Ok((NormalForm::Diagonal { r, theta: first.angle, phi: second.angle }, s0))
        }
        [only] => {
            // one class of multiplicity two: necessarily unit modulus
            let theta = only.class.angle;
            let vs = class_eigenvectors(a, only.class.as_complex(), 2, rel_tol)?;
            let s0 = QMatrix2::new(vs[0].0, vs[1].0, vs[0].1, vs[1].1);
            Ok((NormalForm::Diagonal { r: 1.0, theta, phi: theta }, s0))
        }
        _ => Err(Error::InternalInconsistency(
            "eigenvalue classes of a 2x2 matrix must number 1 or 2".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{self, I, J, K, ONE};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn qi(x: f64) -> Quaternion {
        q(0.0, x, 0.0, 0.0)
    }

    /// A fixed well-conditioned SL(2,H) conjugator built from unit
    /// quaternions and unipotent shears.
    fn test_conjugator() -> QMatrix2 {
        let u1 = q(1.0, 2.0, -1.0, 0.5);
        let u1 = u1 / u1.norm();
        let u2 = q(0.3, -0.4, 1.0, 2.0);
        let u2 = u2 / u2.norm();
        let diag = QMatrix2::diagonal(u1, u2);
        let upper = QMatrix2::new(ONE, q(0.4, -0.3, 0.2, 0.0), quat::ZERO, ONE);
        let lower = QMatrix2::new(ONE, quat::ZERO, q(-0.2, 0.5, 0.0, 0.3), ONE);
        diag * upper * lower
    }

    #[test]
    fn spectrum_of_diagonal_matrix() {
        let a = QMatrix2::diagonal(qi(2.0), qi(0.5));
        let spec = eigenvalue_classes(&a, 1e-8).unwrap();
        assert_eq!(spec.classes.len(), 2);
        assert!(spec.classes[0].class.approx_eq(ClassRep::new(2.0, FRAC_PI_2), 1e-10));
        assert!(spec.classes[1].class.approx_eq(ClassRep::new(0.5, FRAC_PI_2), 1e-10));
        assert_eq!((spec.classes[0].multiplicity, spec.classes[1].multiplicity), (1, 1));
    }

    #[test]
    fn spectrum_of_parabolic_matrix() {
        let a = QMatrix2::parabolic(FRAC_PI_3);
        let spec = eigenvalue_classes(&a, 1e-8).unwrap();
        assert_eq!(spec.classes.len(), 1);
        assert!(spec.classes[0].class.approx_eq(ClassRep::new(1.0, FRAC_PI_3), 1e-7));
        assert_eq!(spec.classes[0].multiplicity, 2);
    }

    #[test]
    fn spectrum_of_conjugated_j_k_diagonal() {
        // j and k are both in the class (1, pi/2)
        let a = QMatrix2::diagonal(J, K).conjugate_by(&test_conjugator()).unwrap();
        let spec = eigenvalue_classes(&a, 1e-8).unwrap();
        assert_eq!(spec.classes.len(), 1);
        assert_eq!(spec.classes[0].multiplicity, 2);
        assert!(spec.classes[0].class.approx_eq(ClassRep::new(1.0, FRAC_PI_2), 1e-8));
    }

    #[test]
    fn diagonalizability_examples() {
        assert!(is_diagonalizable(&QMatrix2::diagonal(qi(2.0), qi(0.5)), 1e-8));
        assert!(is_diagonalizable(&QMatrix2::diagonal(I, -I), 1e-8));
        assert!(!is_diagonalizable(&QMatrix2::parabolic(FRAC_PI_3), 1e-8));
        assert!(!is_diagonalizable(&QMatrix2::parabolic(0.0), 1e-8));
        assert!(is_diagonalizable(&QMatrix2::identity(), 1e-8));
        let conj = QMatrix2::parabolic(2.0).conjugate_by(&test_conjugator()).unwrap();
        assert!(!is_diagonalizable(&conj, 1e-8));
    }

    #[test]
    fn normal_form_of_canonical_diagonal_is_identity_witness() {
        let a = QMatrix2::diagonal(qi(2.0), qi(0.5));
        let (form, wit) = normal_form(&a, 1e-8).unwrap();
        assert!(form.approx_eq(
            &NormalForm::Diagonal { r: 2.0, theta: FRAC_PI_2, phi: FRAC_PI_2 },
            1e-9
        ));
        assert!(wit.s.approx_eq(&QMatrix2::identity(), 1e-9));
    }

    #[test]
    fn normal_form_orders_moduli() {
        let a = QMatrix2::diagonal(qi(0.5), qi(2.0));
        let (form, wit) = normal_form(&a, 1e-8).unwrap();
        assert!(form.approx_eq(
            &NormalForm::Diagonal { r: 2.0, theta: FRAC_PI_2, phi: FRAC_PI_2 },
            1e-9
        ));
        // the witness is the antidiagonal swap, det_H = 1
        assert!(wit.s.approx_eq(&QMatrix2::anti_diagonal(ONE, ONE), 1e-9));
        assert!((wit.s.det_h().unwrap() - 1.0).abs() < 1e-10);
        assert!(wit.residual(&form, &a).unwrap() < 1e-9);
    }

    #[test]
    fn normal_form_of_conjugated_parabolic() {
        let a = QMatrix2::parabolic(FRAC_PI_3).conjugate_by(&test_conjugator()).unwrap();
        let (form, wit) = normal_form(&a, 1e-8).unwrap();
        match form {
            NormalForm::Parabolic { theta } => assert!((theta - FRAC_PI_3).abs() < 1e-8),
            other => panic!("expected parabolic, got {other:?}"),
        }
        assert!(wit.residual(&form, &a).unwrap() < 1e-8);
    }

    #[test]
    fn normal_form_of_central_elements() {
        let (form, wit) = normal_form(&QMatrix2::identity(), 1e-8).unwrap();
        assert!(form.approx_eq(&NormalForm::Diagonal { r: 1.0, theta: 0.0, phi: 0.0 }, 0.0));
        assert!(wit.s.approx_eq(&QMatrix2::identity(), 0.0));
        let (form, _) = normal_form(&-QMatrix2::identity(), 1e-8).unwrap();
        assert!(form.approx_eq(&NormalForm::Diagonal { r: 1.0, theta: PI, phi: PI }, 0.0));
    }

    #[test]
    fn normal_form_is_idempotent_on_canonical_forms() {
        let forms = [
            NormalForm::Diagonal { r: 2.0, theta: FRAC_PI_3, phi: 1.0 },
            NormalForm::Diagonal { r: 1.0, theta: 0.7, phi: 2.1 },
            NormalForm::Diagonal { r: 1.0, theta: 0.9, phi: 0.9 },
            NormalForm::Parabolic { theta: FRAC_PI_3 },
            NormalForm::Parabolic { theta: 0.0 },
        ];
        for form in forms {
            let a = form.materialize();
            let (again, wit) = normal_form(&a, 1e-8).unwrap();
            assert!(again.approx_eq(&form, 1e-9), "{form:?} -> {again:?}");
            assert!(
                wit.s.approx_eq(&QMatrix2::identity(), 1e-7),
                "witness for {form:?} is {:?}",
                wit.s
            );
        }
    }

    #[test]
    fn normal_form_witness_validity_on_conjugated_samples() {
        let s = test_conjugator();
        let reps = [
            QMatrix2::diagonal(qi(2.0), qi(0.5)),
            QMatrix2::diagonal(Quaternion::unit_complex(0.8), Quaternion::unit_complex(2.0)),
            QMatrix2::diagonal(
                Quaternion::unit_complex(FRAC_PI_3).scale(3.0),
                Quaternion::unit_complex(1.1).scale(1.0 / 3.0),
            ),
            QMatrix2::parabolic(2.5),
            QMatrix2::diagonal(J, K),
        ];
        for rep in reps {
            let a = rep.conjugate_by(&s).unwrap();
            let (form, wit) = normal_form(&a, 1e-8).unwrap();
            let res = wit.residual(&form, &a).unwrap();
            assert!(res < 1e-8, "residual {res:e} for {rep:?}");
        }
    }

    #[test]
    fn spectrum_is_conjugation_invariant() {
        let a = QMatrix2::diagonal(
            Quaternion::unit_complex(0.9).scale(1.7),
            Quaternion::unit_complex(2.2).scale(1.0 / 1.7),
        );
        let b = a.conjugate_by(&test_conjugator()).unwrap();
        let sa = eigenvalue_classes(&a, 1e-8).unwrap();
        let sb = eigenvalue_classes(&b, 1e-8).unwrap();
        assert!(sa.matches(&sb, 1e-8));
    }

    #[test]
    fn round_trip_char_poly_of_materialized_form() {
        let a = QMatrix2::diagonal(
            Quaternion::unit_complex(1.2).scale(2.0),
            Quaternion::unit_complex(0.4).scale(0.5),
        )
        .conjugate_by(&test_conjugator())
        .unwrap();
        let (form, _) = normal_form(&a, 1e-8).unwrap();
        let cp_a = a.char_poly().unwrap();
        let cp_n = form.materialize().char_poly().unwrap();
        assert!(cp_a.max_abs_diff(&cp_n) < 1e-8);
    }

    #[test]
    fn right_eigenvector_examples() {
        let a = QMatrix2::diagonal(I, ONE);
        let v = right_eigenvector(&a, ClassRep::new(1.0, FRAC_PI_2), 1e-8).unwrap();
        assert!(v.0.norm() > 1.0 - 1e-9 && v.1.norm() < 1e-9);
        let v = right_eigenvector(&a, ClassRep::new(1.0, 0.0), 1e-8).unwrap();
        assert!(v.1.norm() > 1.0 - 1e-9 && v.0.norm() < 1e-9);
        assert!(matches!(
            right_eigenvector(&a, ClassRep::new(3.0, 1.0), 1e-8),
            Err(Error::NotAnEigenclass { .. })
        ));
    }

    #[test]
    fn right_eigenvector_of_conjugated_hyperbolic() {
        let rep = QMatrix2::diagonal(
            Quaternion::unit_complex(0.6).scale(2.0),
            Quaternion::unit_complex(1.9).scale(0.5),
        );
        let a = rep.conjugate_by(&test_conjugator()).unwrap();
        let class = ClassRep::new(2.0, 0.6);
        let v = right_eigenvector(&a, class, 1e-8).unwrap();
        let lambda = class.as_complex();
        assert!(eigen_residual(&a, v, lambda) < 1e-9);
        let norm = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parabolic_shape_criterion() {
        // parabolic form iff single unit-modulus class of multiplicity 2 and
        // not diagonalizable
        let par = QMatrix2::parabolic(1.0).conjugate_by(&test_conjugator()).unwrap();
        let spec = eigenvalue_classes(&par, 1e-8).unwrap();
        assert_eq!(spec.classes.len(), 1);
        assert!((spec.classes[0].class.modulus - 1.0).abs() < 1e-8);
        assert!(!is_diagonalizable(&par, 1e-8));

        let ell = QMatrix2::diagonal(I, I).conjugate_by(&test_conjugator()).unwrap();
        let spec = eigenvalue_classes(&ell, 1e-8).unwrap();
        assert_eq!(spec.classes.len(), 1);
        assert!(is_diagonalizable(&ell, 1e-8));
    }

    #[test]
    fn normal_form_rejects_non_unit_determinant() {
        let a = QMatrix2::diagonal(q(2.0, 0.0, 0.0, 0.0), q(2.0, 0.0, 0.0, 0.0));
        assert!(matches!(normal_form(&a, 1e-8), Err(Error::NotUnitDeterminant { .. })));
    }

    #[test]
    fn serde_normal_form_shape() {
        let nf = NormalForm::Diagonal { r: 2.0, theta: 0.5, phi: 1.0 };
        let v = serde_json::to_value(nf).unwrap();
        assert_eq!(v["kind"], "diagonal");
        assert_eq!(v["r"], 2.0);
        let nf = NormalForm::Parabolic { theta: 0.25 };
        let v = serde_json::to_value(nf).unwrap();
        assert_eq!(v["kind"], "parabolic");
        assert_eq!(v["theta"], 0.25);
    }
}
