//! Randomized verification suite: every classification and reversibility
//! statement implemented by this crate, run as a numerical property check
//! over seeded families of matrices.
//!
//! Each check draws its own deterministic RNG stream from the suite seed,
//! so checks are independent and the whole suite is reproducible. A check
//! records per-sample residuals against a fixed threshold and keeps the
//! first few counterexamples as JSON.

use serde::Serialize;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI};

use rand_chacha::ChaCha8Rng;

use crate::classify::{algebraic_class, coeff_identities, dynamical_type, DynamicalType};
use crate::moebius::{apply_moebius, fixed_points, ExtendedQuaternion};
use crate::qmat::QMatrix2;
use crate::quat::Quaternion;
use crate::reversibility::{
    construct_reverser, decompose_involutions, extended_centralizer_membership,
    is_conj_neg_inverse, is_reversible_sl, is_strongly_reversible_sl, psl_report,
    structural_membership, DecompositionMode, MembershipVerdict, ReverserSign,
};
use crate::sample::{
    rng_from_seed, sample_centralizer, sample_conjugator, sample_gl, sample_matrix,
    sample_neg_reverser_set, sample_reverser_set, Family, SampleConfig,
};
use crate::spectral::{eigenvalue_classes, is_diagonalizable, normal_form, NormalForm};
use crate::Error;

/// Suite parameters.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per randomized check (grid checks use their fixed grids).
    pub samples: usize,
    /// Base tolerance for classification predicates.
    pub tol: f64,
    pub cond_bound: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, samples: 1000, tol: crate::tol::SPECTRAL, cond_bound: 20.0 }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
    /// Largest recorded residual (checks define what they measure).
    pub max_residual: f64,
    pub threshold: f64,
    pub counterexamples: Vec<serde_json::Value>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Results of the whole suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySuiteResult {
    pub seed: u64,
    pub samples_per_check: usize,
    pub checks: Vec<CheckResult>,
    pub wall_time_ms: f64,
}

impl VerifySuiteResult {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Check {
    result: CheckResult,
}

impl Check {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self {
            result: CheckResult {
                name,
                samples: 0,
                failures: 0,
                max_residual: 0.0,
                threshold,
                counterexamples: Vec::new(),
            },
        }
    }

    fn record(&mut self, residual: f64, context: impl FnOnce() -> serde_json::Value) {
        self.result.samples += 1;
        if residual.is_nan() || residual > self.result.max_residual {
            self.result.max_residual = residual;
        }
        if !(residual <= self.result.threshold) {
            self.result.failures += 1;
            if self.result.counterexamples.len() < 3 {
                self.result.counterexamples.push(context());
            }
        }
    }

    fn record_flag(&mut self, ok: bool, context: impl FnOnce() -> serde_json::Value) {
        self.record(if ok { 0.0 } else { 1.0 }, context);
    }

    fn finish(self) -> CheckResult {
        self.result
    }
}

fn mixed_families() -> Vec<Family> {
    Family::all()
}

/// Families whose elements are reversible in SL(2,H).
const SL_REVERSIBLE_CASES: [u8; 6] = [3, 4, 5, 6, 7, 8];

fn expected_case(family: Family) -> u8 {
    match family {
        Family::Case(k) => k,
        Family::ParabolicAxis | Family::ParabolicHalfTurn => 8,
        Family::HyperbolicAxis => 4,
        Family::Central => 6,
        Family::Involution => 7,
        Family::SkewInvolution => 7,
    }
}

fn case_from_form(form: &NormalForm, diagonalizable: bool, tol: f64) -> u8 {
    match *form {
        NormalForm::Parabolic { .. } => {
            debug_assert!(!diagonalizable);
            8
        }
        NormalForm::Diagonal { r, theta, phi } => {
            let unit = (r - 1.0).abs() <= tol;
            let equal = (theta - phi).abs() <= tol;
            let pi_pair = (theta + phi - PI).abs() <= tol;
            if unit {
                if equal && (theta - FRAC_PI_2).abs() <= tol {
                    7 // diag(i, i) belongs to the theta + phi = pi family
                } else if equal {
                    6
                } else if pi_pair {
                    7
                } else {
                    5
                }
            } else if equal {
                if (theta - FRAC_PI_2).abs() <= tol {
                    3
                } else {
                    4
                }
            } else if pi_pair {
                2
            } else {
                1
            }
        }
    }
}

fn matrix_json(a: &QMatrix2) -> serde_json::Value {
    serde_json::to_value(a).expect("matrix serialization is infallible")
}

fn err_json(a: &QMatrix2, err: &Error) -> serde_json::Value {
    json!({ "matrix": matrix_json(a), "error": err.to_string() })
}

/// Runs the full suite; the result lists one entry per check.
pub fn run_suite(cfg: &VerifyConfig) -> VerifySuiteResult {
    let started = std::time::Instant::now();
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        rng_from_seed(cfg.seed.wrapping_add(stream.wrapping_mul(0x9e3779b97f4a7c15)))
    };
    let checks = vec![
        psl_reversibility_equivalence(cfg, &mut next_rng()),
        reverser_validity(cfg, &mut next_rng()),
        strong_reversibility_negatives(cfg, &mut next_rng()),
        factorization_contracts(cfg, &mut next_rng()),
        coefficient_identities_vs_embedding(cfg, &mut next_rng()),
        coefficient_identity_biconditionals(),
        classification_consistency(cfg, &mut next_rng()),
        classification_partition(cfg, &mut next_rng()),
        normal_form_witnesses(cfg, &mut next_rng()),
        normal_form_idempotence(cfg, &mut next_rng()),
        spectrum_conjugation_invariance(cfg, &mut next_rng()),
        extended_centralizer_subgroup(cfg, &mut next_rng()),
        membership_structural_agreement(cfg, &mut next_rng()),
        sl_reversibility_exhaustiveness(cfg, &mut next_rng()),
        moebius_homomorphism(cfg, &mut next_rng()),
        moebius_lift_equivalence(cfg, &mut next_rng()),
        moebius_fixed_point_equivariance(cfg, &mut next_rng()),
        moebius_fixed_point_count(cfg, &mut next_rng()),
        phi_multiplicativity(cfg, &mut next_rng()),
        study_determinant_nonnegative(cfg, &mut next_rng()),
        eigenvalue_conjugate_closure(cfg, &mut next_rng()),
        charpoly_dual_route(cfg, &mut next_rng()),
        charpoly_conjugation_invariance(cfg, &mut next_rng()),
        sl_normalize_unit_c0(cfg, &mut next_rng()),
    ];
    VerifySuiteResult {
        seed: cfg.seed,
        samples_per_check: cfg.samples,
        checks,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

/// The three-way equivalence: reversible in PSL via the normal-form route,
/// strongly reversible via a verified two-involution factorization, and the
/// coefficient test `c1^2 = c3^2`, must agree on every sample.
fn psl_reversibility_equivalence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("psl-reversibility-equivalence", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        match psl_report(&a, cfg.tol) {
            Ok(report) => {
                // psl_report already hard-asserts route agreement; re-check
                // the projective equivalences and the factorization evidence
                let consistent = report.reversible_psl == report.c1_sq_eq_c3_sq
                    && report.reversible_psl == report.strongly_reversible_psl
                    && report.reversible_psl
                        == (report.reversible_sl || report.conj_neg_inverse)
                    && (!report.strongly_reversible_sl || report.reversible_sl);
                let residual = if report.reversible_psl {
                    report.factorization_residual.unwrap_or(f64::NAN)
                } else {
                    0.0
                };
                let residual = if consistent { residual } else { f64::NAN };
                check.record(residual, || {
                    json!({
                        "matrix": matrix_json(&a),
                        "family": family.name(),
                        "report": serde_json::to_value(&report).unwrap(),
                    })
                });
            }
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// Constructed reversers satisfy their defining equations tightly, and
/// non-reversible samples raise `NotReversible` for both signs.
fn reverser_validity(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("reverser-validity", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        for (sign, predicate) in [
            (ReverserSign::Plus, is_reversible_sl(&a, cfg.tol)),
            (ReverserSign::Minus, is_conj_neg_inverse(&a, cfg.tol)),
        ] {
            let expected = match predicate {
                Ok(p) => p,
                Err(err) => {
                    check.record(f64::NAN, || err_json(&a, &err));
                    continue;
                }
            };
            match (construct_reverser(&a, sign, cfg.tol), expected) {
                (Ok(g), true) => {
                    let flip = if sign == ReverserSign::Plus { 1.0 } else { -1.0 };
                    let residual = (|| -> crate::Result<f64> {
                        let target = a.inverse()?.scale(flip);
                        let conj = g * a * g.inverse()?;
                        let det_err = (g.det_h()? - 1.0).abs();
                        Ok(conj.distance_inf(&target).max(det_err))
                    })()
                    .unwrap_or(f64::NAN);
                    check.record(residual, || {
                        json!({ "matrix": matrix_json(&a), "family": family.name(), "sign": format!("{sign:?}") })
                    });
                }
                (Err(Error::NotReversible { .. }), false) => {
                    check.record(0.0, || json!({}));
                }
                (got, _) => {
                    let desc = match got {
                        Ok(_) => "constructed a reverser for a non-reversible input".to_string(),
                        Err(e) => format!("unexpected outcome: {e}"),
                    };
                    check.record(f64::NAN, || {
                        json!({ "matrix": matrix_json(&a), "family": family.name(), "detail": desc })
                    });
                }
            }
        }
    }
    check.finish()
}

/// No element of the reverser set of `diag(e^it, e^ip)` (interior distinct
/// angles) or of an interior parabolic squares to the identity: the
/// recorded quantity is `1 - |g^2 - I|`, which must stay at or below zero.
fn strong_reversibility_negatives(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("strong-reversibility-negatives", 0.0);
    let id = QMatrix2::identity();
    let families = [Family::Case(5), Family::Case(7), Family::Case(8)];
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let form = crate::sample::sample_form(family, rng, 0.02);
        let g = match sample_reverser_set(&form, rng, cfg.tol) {
            Ok(Some(g)) => g,
            Ok(None) => {
                check.record(f64::NAN, || json!({ "detail": "empty reverser set" }));
                continue;
            }
            Err(err) => {
                check.record(f64::NAN, || json!({ "error": err.to_string() }));
                continue;
            }
        };
        // sanity: the sampled element really is a reverser of the form
        let n = form.materialize();
        let reverses = (|| -> crate::Result<f64> {
            Ok((g * n * g.inverse()?).distance_inf(&n.inverse()?))
        })()
        .unwrap_or(f64::NAN);
        if !(reverses <= 1e-8) {
            check.record(f64::NAN, || {
                json!({ "form": serde_json::to_value(form).unwrap(), "detail": "sampled element does not reverse" })
            });
            continue;
        }
        let distance = (g * g).distance_inf(&id);
        check.record(1.0 - distance, || {
            json!({
                "form": serde_json::to_value(form).unwrap(),
                "reverser": matrix_json(&g),
                "square_distance_from_identity": distance,
            })
        });
    }
    check.finish()
}

/// Factorization contracts: each admissible mode produces factors squaring
/// to the advertised signs with product `A`; inadmissible modes raise.
fn factorization_contracts(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("factorization-contracts", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let (strongly, reversible, neg) = match (
            is_strongly_reversible_sl(&a, cfg.tol),
            is_reversible_sl(&a, cfg.tol),
            is_conj_neg_inverse(&a, cfg.tol),
        ) {
            (Ok(s), Ok(r), Ok(n)) => (s, r, n),
            _ => {
                check.record(f64::NAN, || err_json(&a, &Error::CentralElement));
                continue;
            }
        };
        for (mode, admissible, signs) in [
            (DecompositionMode::Involutions, strongly, Some((1, 1))),
            (DecompositionMode::SkewInvolutions, reversible, Some((-1, -1))),
            (DecompositionMode::Psl, strongly || reversible || neg, None),
        ] {
            match (decompose_involutions(&a, mode, cfg.tol), admissible) {
                (Ok(f), true) => {
                    let signs_ok = match signs {
                        Some(expected) => (f.b_sign, f.c_sign) == expected,
                        None => f.b_sign.abs() == 1 && f.c_sign.abs() == 1,
                    };
                    let residual = if signs_ok { f.residual(&a) } else { f64::NAN };
                    check.record(residual, || {
                        json!({
                            "matrix": matrix_json(&a),
                            "family": family.name(),
                            "mode": mode.as_str(),
                            "signs": [f.b_sign, f.c_sign],
                        })
                    });
                }
                (Err(Error::NotDecomposable { .. }), false) => check.record(0.0, || json!({})),
                (got, _) => {
                    let desc = match got {
                        Ok(_) => format!("{} factorization of inadmissible input", mode.as_str()),
                        Err(e) => format!("unexpected outcome: {e}"),
                    };
                    check.record(f64::NAN, || {
                        json!({ "matrix": matrix_json(&a), "family": family.name(), "detail": desc })
                    });
                }
            }
        }
    }
    check.finish()
}

/// Closed-form coefficients match the embedding route over random
/// parameters with `r` spanning two orders of magnitude.
fn coefficient_identities_vs_embedding(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    use rand::Rng;
    let mut check = Check::new("coefficient-identities-vs-embedding", 1e-10);
    for _ in 0..cfg.samples {
        let r = 10f64.powf(rng.gen_range(-1.0..1.0));
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..PI);
        let closed = match coeff_identities(r, theta, phi) {
            Ok(cp) => cp,
            Err(err) => {
                check.record(f64::NAN, || json!({ "error": err.to_string() }));
                continue;
            }
        };
        let a = QMatrix2::diagonal(
            Quaternion::unit_complex(theta).scale(r),
            Quaternion::unit_complex(phi).scale(1.0 / r),
        );
        let residual = match a.char_poly() {
            Ok(cp) => closed.max_abs_diff(&cp),
            Err(_) => f64::NAN,
        };
        check.record(residual, || json!({ "r": r, "theta": theta, "phi": phi }));
    }
    check.finish()
}

/// Coefficient-identity biconditionals on a structured grid.
///
/// The grid unions a generic block (angles at irrational offsets, moduli
/// away from 1) with exact condition slices (`r = 1`, `theta = phi`,
/// `theta = pi - phi`, `theta = phi = pi/2`, axis angles). On-condition
/// points must satisfy their identities to 1e-9; off-condition points must
/// miss them by a wide margin. Generic coordinates matter: each identity's
/// "only if" direction admits exceptional off-condition solutions (e.g.
/// `r^2 sin^2(phi) = sin^2(theta)` makes the first moreover-identity hold
/// with non-axis angles), and the grid must not land on those surfaces.
fn coefficient_identity_biconditionals() -> CheckResult {
    let mut check = Check::new("coefficient-identity-biconditionals", 0.0);
    let mut thetas: Vec<f64> = (0..26).map(|k| (k as f64 + 0.37) * PI / 26.0).collect();
    thetas.push(0.0);
    thetas.push(PI);
    thetas.push(FRAC_PI_2);
    let moduli = [0.27, 0.53, 1.0, 1.9, 3.7];

    let mut points: Vec<(f64, f64, f64)> = Vec::new();
    for &r in &moduli {
        for &theta in &thetas {
            for &phi in &thetas {
                points.push((r, theta, phi));
            }
            // exact antidiagonal slice theta + phi = pi
            points.push((r, theta, PI - theta));
        }
    }

    for (r, theta, phi) in points {
        let cp = match coeff_identities(r, theta, phi) {
            Ok(cp) => cp,
            Err(err) => {
                check.record(f64::NAN, || json!({ "error": err.to_string() }));
                continue;
            }
        };
        let scale = 1.0 + r * r + 1.0 / (r * r);
        let eq_tol = 1e-9 * scale;
        let gap_tol = 1e-6 * scale;
        let cond_tol = 1e-9;

        let axis = |t: f64| t.abs() <= cond_tol || (PI - t).abs() <= cond_tol;
        let unit = (r - 1.0).abs() <= cond_tol;
        let equal = (theta - phi).abs() <= cond_tol;
        let pi_pair = (theta + phi - PI).abs() <= cond_tol;
        let half = (theta - FRAC_PI_2).abs() <= cond_tol && (phi - FRAC_PI_2).abs() <= cond_tol;

        let quantities = [
            ("c1-eq-c3", cp.c1 - cp.c3, unit || equal),
            ("c1-eq-neg-c3", cp.c1 + cp.c3, pi_pair),
            ("c1-eq-zero", cp.c1, half || (unit && pi_pair)),
            (
                "c2-gap-cos-difference",
                cp.c2 - (cp.c1 * cp.c1 / 4.0 + 2.0) + (theta.cos() - phi.cos()).powi(2),
                unit || (axis(theta) && axis(phi)),
            ),
            (
                "c2-gap-shrink",
                cp.c2
                    - (cp.c1 * cp.c1 / 4.0 + 2.0)
                    - (r - 1.0 / r).powi(2) * (1.0 - theta.cos().powi(2)),
                equal,
            ),
            (
                "c2-gap-stretch",
                cp.c2
                    - (cp.c1 * cp.c1 / 4.0 - 2.0)
                    - (r + 1.0 / r).powi(2) * (1.0 - theta.cos().powi(2)),
                pi_pair,
            ),
        ];
        for (item, quantity, condition) in quantities {
            // holds-on-condition: tight residual; off-condition: the
            // equality must miss by a clear gap
            let residual = if condition {
                quantity.abs() - eq_tol
            } else if quantity.abs() >= gap_tol {
                0.0
            } else {
                f64::NAN
            };
            check.record(residual.max(0.0).min(if residual.is_nan() { f64::NAN } else { residual.max(0.0) }), || {
                json!({
                    "item": item,
                    "r": r, "theta": theta, "phi": phi,
                    "quantity": quantity,
                    "condition_holds": condition,
                })
            });
        }
    }
    check.finish()
}

/// Coefficient classification agrees with the generated family and with the
/// normal-form route.
fn classification_consistency(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("classification-consistency", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let outcome = (|| -> crate::Result<(u8, u8)> {
            let cp = a.char_poly()?;
            let diag = is_diagonalizable(&a, cfg.tol);
            let ac = algebraic_class(&cp, diag, cfg.tol)?;
            let (form, _) = normal_form(&a, cfg.tol)?;
            Ok((ac.case_id, case_from_form(&form, diag, cfg.tol.max(1e-7))))
        })();
        match outcome {
            Ok((from_coeffs, from_form)) => {
                let expected = expected_case(family);
                check.record_flag(from_coeffs == expected && from_form == expected, || {
                    json!({
                        "matrix": matrix_json(&a),
                        "family": family.name(),
                        "expected": expected,
                        "from_coefficients": from_coeffs,
                        "from_normal_form": from_form,
                    })
                });
            }
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// The eight case predicates partition the samples: exactly one fires.
fn classification_partition(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("classification-partition", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    let t = cfg.tol;
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let Ok(cp) = a.char_poly() else {
            check.record(f64::NAN, || matrix_json(&a));
            continue;
        };
        let diag = is_diagonalizable(&a, t);
        let (c1, c2, c3) = (cp.c1, cp.c2, cp.c3);
        let c1_small = c1.abs() <= t && c3.abs() <= t;
        let parabola_gap = c2 - (c1 * c1 / 4.0 + 2.0);
        let predicates = [
            (c1 - c3).abs() > t && (c1 + c3).abs() > t,
            (c1 + c3).abs() <= t && c1.abs() > t,
            c1_small && c2 > 2.0 + t,
            (c1 - c3).abs() <= t
                && c1.abs() > t
                && (parabola_gap > t || (parabola_gap.abs() <= t && c1.abs() > 4.0 + t)),
            (c1 - c3).abs() <= t && c1.abs() > t && parabola_gap < -t,
            (c1 - c3).abs() <= t
                && c1.abs() > t
                && parabola_gap.abs() <= t
                && c1.abs() <= 4.0 + t
                && diag,
            c1_small && (-2.0 - t..=2.0 + t).contains(&c2) && (diag || (c2 - 2.0).abs() > t),
            (c1 - c3).abs() <= t && parabola_gap.abs() <= t && c1.abs() <= 4.0 + t && !diag,
        ];
        let fired = predicates.iter().filter(|&&p| p).count();
        check.record_flag(fired == 1, || {
            json!({
                "matrix": matrix_json(&a),
                "family": family.name(),
                "fired": predicates
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p)
                    .map(|(i, _)| i + 1)
                    .collect::<Vec<_>>(),
            })
        });
    }
    check.finish()
}

/// Normal-form witnesses reconstruct their matrices tightly.
fn normal_form_witnesses(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("normal-form-witnesses", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        match normal_form(&a, cfg.tol) {
            Ok((form, wit)) => {
                let residual = wit.residual(&form, &a).unwrap_or(f64::NAN);
                check.record(residual, || {
                    json!({ "matrix": matrix_json(&a), "family": family.name() })
                });
            }
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// Canonical forms are fixed points of normal_form with witness `I`.
fn normal_form_idempotence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("normal-form-idempotence", 1e-7);
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let form = crate::sample::sample_form(family, rng, 0.02);
        let a = form.materialize();
        match normal_form(&a, cfg.tol) {
            Ok((again, wit)) => {
                let form_ok = again.approx_eq(&form, 1e-7);
                let witness_drift = wit.s.distance_inf(&QMatrix2::identity());
                let residual = if form_ok { witness_drift } else { f64::NAN };
                check.record(residual, || {
                    json!({
                        "form": serde_json::to_value(form).unwrap(),
                        "recomputed": serde_json::to_value(again).unwrap(),
                        "witness_drift": witness_drift,
                    })
                });
            }
            Err(err) => check.record(f64::NAN, || json!({ "error": err.to_string() })),
        }
    }
    check.finish()
}

/// Eigenvalue classes are invariant under conjugation.
fn spectrum_conjugation_invariance(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("spectrum-conjugation-invariance", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let s = sample_conjugator(rng, cfg.cond_bound);
        let outcome = (|| -> crate::Result<bool> {
            let b = a.conjugate_by(&s)?;
            let sa = eigenvalue_classes(&a, cfg.tol)?;
            let sb = eigenvalue_classes(&b, cfg.tol)?;
            Ok(sa.matches(&sb, 1e-6))
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "matrix": matrix_json(&a), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// Group structure of the extended centralizer: products of two reversers
/// centralize, and products of a reverser with a centralizer reverse.
fn extended_centralizer_subgroup(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("extended-centralizer-subgroup", 0.5);
    // families whose canonical forms are non-degenerate (A^2 != +-I) and
    // reversible, so the three verdicts stay distinct
    let families = [Family::Case(4), Family::Case(5), Family::Case(6), Family::Case(8)];
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let form = crate::sample::sample_form(family, rng, 0.02);
        let n = form.materialize();
        let outcome = (|| -> crate::Result<Option<(MembershipVerdict, MembershipVerdict, MembershipVerdict)>> {
            let Some(g1) = sample_reverser_set(&form, rng, cfg.tol)? else { return Ok(None) };
            let Some(g2) = sample_reverser_set(&form, rng, cfg.tol)? else { return Ok(None) };
            let z = sample_centralizer(&form, rng, cfg.tol)?;
            let rr = extended_centralizer_membership(&n, &(g1 * g2), cfg.tol)?;
            let rz = extended_centralizer_membership(&n, &(g1 * z), cfg.tol)?;
            let zr = extended_centralizer_membership(&n, &(z * g1), cfg.tol)?;
            Ok(Some((rr, rz, zr)))
        })();
        match outcome {
            Ok(Some((rr, rz, zr))) => {
                let ok = rr == MembershipVerdict::Centralizer
                    && rz == MembershipVerdict::Reverser
                    && zr == MembershipVerdict::Reverser;
                check.record_flag(ok, || {
                    json!({
                        "form": serde_json::to_value(form).unwrap(),
                        "reverser_times_reverser": format!("{rr:?}"),
                        "reverser_times_centralizer": format!("{rz:?}"),
                        "centralizer_times_reverser": format!("{zr:?}"),
                    })
                });
            }
            Ok(None) => check.record(f64::NAN, || json!({ "detail": "empty reverser set" })),
            Err(err) => check.record(f64::NAN, || json!({ "error": err.to_string() })),
        }
    }
    check.finish()
}

/// The structural tables agree with numerical membership on canonical forms.
fn membership_structural_agreement(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("membership-structural-agreement", 0.5);
    let families = [
        Family::Case(2),
        Family::Case(4),
        Family::Case(5),
        Family::Case(6),
        Family::Case(7),
        Family::Case(8),
        Family::ParabolicHalfTurn,
        Family::Involution,
    ];
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let form = crate::sample::sample_form(family, rng, 0.02);
        let n = form.materialize();
        let outcome = (|| -> crate::Result<bool> {
            let mut ok = true;
            let z = sample_centralizer(&form, rng, cfg.tol)?;
            let numeric = extended_centralizer_membership(&n, &z, cfg.tol)?;
            if let Some(s) = structural_membership(&n, &z, cfg.tol) {
                ok &= s == numeric;
            }
            if let Some(g) = sample_reverser_set(&form, rng, cfg.tol)? {
                let numeric = extended_centralizer_membership(&n, &g, cfg.tol)?;
                if let Some(s) = structural_membership(&n, &g, cfg.tol) {
                    ok &= s == numeric;
                }
            }
            if let Some(g) = sample_neg_reverser_set(&form, rng, cfg.tol)? {
                let numeric = extended_centralizer_membership(&n, &g, cfg.tol)?;
                if let Some(s) = structural_membership(&n, &g, cfg.tol) {
                    ok &= s == numeric;
                }
            }
            Ok(ok)
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "form": serde_json::to_value(form).unwrap(), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || json!({ "error": err.to_string() })),
        }
    }
    check.finish()
}

/// The family-table answer to SL reversibility agrees with the direct
/// spectral predicate (the eigenvalue-class multiset is inverse-closed).
fn sl_reversibility_exhaustiveness(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("sl-reversibility-exhaustiveness", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let outcome = (|| -> crate::Result<bool> {
            let by_table = is_reversible_sl(&a, cfg.tol)?;
            let direct = eigenvalue_classes(&a, cfg.tol)?.is_inverse_closed(1e-6);
            Ok(by_table == direct)
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "matrix": matrix_json(&a), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

fn random_point(rng: &mut ChaCha8Rng) -> Quaternion {
    use rand::Rng;
    Quaternion::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    )
}

/// `apply(AB, z) = apply(A, apply(B, z))` away from pole neighborhoods.
fn moebius_homomorphism(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("moebius-homomorphism", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    let mut produced = 0usize;
    let mut attempts = 0usize;
    while produced < cfg.samples && attempts < cfg.samples * 10 {
        attempts += 1;
        let fa = families[attempts % families.len()];
        let fb = families[(attempts / families.len()) % families.len()];
        let Ok((a, _)) = sample_matrix(fa, rng, &sample_cfg) else { continue };
        let Ok((b, _)) = sample_matrix(fb, rng, &sample_cfg) else { continue };
        let z = random_point(rng);
        // refuse near-pole evaluations; the map is unbounded there
        let pole_b = (b.c * z + b.d).norm();
        if pole_b <= 0.05 * (1.0 + z.norm()) {
            continue;
        }
        let prod = a * b;
        let pole_ab = (prod.c * z + prod.d).norm();
        if pole_ab <= 0.05 * (1.0 + z.norm()) {
            continue;
        }
        let zq = ExtendedQuaternion::Finite(z);
        let outcome = (|| -> crate::Result<f64> {
            let inner = apply_moebius(&b, &zq, 1e-9)?;
            if let ExtendedQuaternion::Finite(w) = inner {
                let pole_a = (a.c * w + a.d).norm();
                if pole_a <= 0.05 * (1.0 + w.norm()) {
                    return Ok(-1.0); // sentinel: skip
                }
            }
            let two_step = apply_moebius(&a, &inner, 1e-9)?;
            let one_step = apply_moebius(&prod, &zq, 1e-9)?;
            match (one_step, two_step) {
                (ExtendedQuaternion::Finite(p), ExtendedQuaternion::Finite(q)) => {
                    Ok((p - q).norm() / (1.0 + p.norm().max(q.norm()).powi(2)))
                }
                (p, q) => Ok(if p.approx_eq(&q, 1e-8) { 0.0 } else { f64::NAN }),
            }
        })();
        match outcome {
            Ok(r) if r < 0.0 => continue,
            Ok(residual) => {
                produced += 1;
                check.record(residual, || {
                    json!({ "a": matrix_json(&a), "b": matrix_json(&b), "z": serde_json::to_value(z).unwrap() })
                });
            }
            Err(err) => {
                produced += 1;
                check.record(f64::NAN, || json!({ "error": err.to_string() }));
            }
        }
    }
    check.finish()
}

/// Both lifts of a projective class act identically, bit for bit.
fn moebius_lift_equivalence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("moebius-lift-equivalence", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let z = if i % 7 == 0 {
            ExtendedQuaternion::Infinity
        } else {
            ExtendedQuaternion::Finite(random_point(rng))
        };
        let outcome = (|| -> crate::Result<bool> {
            let plus = apply_moebius(&a, &z, 1e-9)?;
            let minus = apply_moebius(&-a, &z, 1e-9)?;
            Ok(plus == minus)
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "matrix": matrix_json(&a), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// Fixed points move equivariantly under conjugation.
fn moebius_fixed_point_equivariance(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("moebius-fixed-point-equivariance", 0.5);
    // families with a canonical (basis-independent) fixed-point set: all
    // eigenvalue classes simple, or parabolic
    let families = [
        Family::Case(1),
        Family::Case(2),
        Family::Case(3),
        Family::Case(4),
        Family::Case(5),
        Family::Case(7),
        Family::Case(8),
        Family::HyperbolicAxis,
    ];
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let form = crate::sample::sample_form(family, rng, 0.02);
        let n = form.materialize();
        let s = sample_conjugator(rng, cfg.cond_bound);
        let outcome = (|| -> crate::Result<bool> {
            let a = n.conjugate_by(&s)?;
            let base = fixed_points(&n, cfg.tol)?;
            let conj = fixed_points(&a, cfg.tol)?;
            if base.len() != conj.len() {
                return Ok(false);
            }
            for p in &base {
                let moved = apply_moebius(&s, p, 1e-9)?;
                if !conj.iter().any(|cp| cp.approx_eq(&moved, 1e-6)) {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "form": serde_json::to_value(form).unwrap(), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || json!({ "error": err.to_string() })),
        }
    }
    check.finish()
}

/// Hyperbolic transformations have exactly two sphere fixed points,
/// parabolic ones exactly one.
fn moebius_fixed_point_count(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("moebius-fixed-point-count", 0.5);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = [
        Family::Case(1),
        Family::Case(2),
        Family::Case(3),
        Family::Case(4),
        Family::HyperbolicAxis,
        Family::Case(8),
        Family::ParabolicAxis,
        Family::ParabolicHalfTurn,
    ];
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let outcome = (|| -> crate::Result<bool> {
            let kind = dynamical_type(&a, cfg.tol)?;
            let count = fixed_points(&a, cfg.tol)?.len();
            Ok(match kind {
                DynamicalType::Hyperbolic => count == 2,
                DynamicalType::Parabolic => count == 1,
                DynamicalType::Elliptic => count >= 1,
            })
        })();
        match outcome {
            Ok(ok) => check.record_flag(ok, || {
                json!({ "matrix": matrix_json(&a), "family": family.name() })
            }),
            Err(err) => check.record(f64::NAN, || err_json(&a, &err)),
        }
    }
    check.finish()
}

/// The embedding is multiplicative.
fn phi_multiplicativity(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("phi-multiplicativity", 1e-9);
    for _ in 0..cfg.samples {
        let a = sample_gl(rng);
        let b = sample_gl(rng);
        let lhs = (a * b).phi();
        let rhs = &a.phi() * &b.phi();
        let residual = (lhs.as_matrix() - rhs.as_matrix()).norm();
        check.record(residual, || json!({ "a": matrix_json(&a), "b": matrix_json(&b) }));
    }
    check.finish()
}

/// The Study determinant is non-negative on arbitrary matrices.
fn study_determinant_nonnegative(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("study-determinant-nonnegative", 1e-9);
    for _ in 0..cfg.samples {
        let a = sample_gl(rng);
        let residual = match a.det_h() {
            Ok(det) => (-det).max(0.0),
            Err(_) => f64::NAN,
        };
        check.record(residual, || matrix_json(&a));
    }
    check.finish()
}

/// Eigenvalues of the embedding are closed under complex conjugation.
fn eigenvalue_conjugate_closure(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("eigenvalue-conjugate-closure", 1e-9);
    for _ in 0..cfg.samples {
        let a = sample_gl(rng);
        let residual = match a.phi().eigenvalues() {
            Ok(evs) => {
                // greedy multiset matching of {conj(ev)} against {ev}
                let mut pool: Vec<_> = evs.to_vec();
                let mut worst = 0.0f64;
                for e in evs.iter() {
                    let target = e.conj();
                    let (idx, dist) = pool
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (i, (p - target).norm()))
                        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                        .expect("pool is never empty");
                    worst = worst.max(dist);
                    pool.swap_remove(idx);
                }
                worst
            }
            Err(_) => f64::NAN,
        };
        check.record(residual, || matrix_json(&a));
    }
    check.finish()
}

/// The trace route and the eigenvalue route to the characteristic
/// polynomial agree.
fn charpoly_dual_route(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("charpoly-dual-route", 1e-9);
    for _ in 0..cfg.samples {
        let a = sample_gl(rng);
        let residual = match (a.char_poly(), a.char_poly_from_eigenvalues()) {
            (Ok(p), Ok(q)) => p.max_abs_diff(&q),
            _ => f64::NAN,
        };
        check.record(residual, || matrix_json(&a));
    }
    check.finish()
}

/// Characteristic polynomials are conjugation invariants.
fn charpoly_conjugation_invariance(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("charpoly-conjugation-invariance", 1e-8);
    let sample_cfg = SampleConfig { cond_bound: cfg.cond_bound, ..Default::default() };
    let families = mixed_families();
    for i in 0..cfg.samples {
        let family = families[i % families.len()];
        let Ok((a, _)) = sample_matrix(family, rng, &sample_cfg) else { continue };
        let s = sample_conjugator(rng, cfg.cond_bound);
        let residual = (|| -> crate::Result<f64> {
            let b = a.conjugate_by(&s)?;
            Ok(a.char_poly()?.max_abs_diff(&b.char_poly()?))
        })()
        .unwrap_or(f64::NAN);
        check.record(residual, || json!({ "matrix": matrix_json(&a), "family": family.name() }));
    }
    check.finish()
}

/// After `sl_normalize` the constant coefficient is 1.
fn sl_normalize_unit_c0(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut check = Check::new("sl-normalize-unit-c0", 1e-9);
    let mut produced = 0usize;
    let mut attempts = 0usize;
    while produced < cfg.samples && attempts < cfg.samples * 10 {
        attempts += 1;
        let a = sample_gl(rng);
        // skip near-singular draws; normalization would amplify noise
        match a.det_h() {
            Ok(det) if det > 1e-4 => {
                let residual = a
                    .sl_normalize()
                    .and_then(|n| n.char_poly())
                    .map(|cp| (cp.c0 - 1.0).abs())
                    .unwrap_or(f64::NAN);
                produced += 1;
                check.record(residual, || matrix_json(&a));
            }
            _ => continue,
        }
    }
    check.finish()
}
