//! The invariant suite run by `vncert verify`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrim::{
    achieved_distance, analytic_table, antisymmetric_state, diamond_bounds, error_mean_inequality,
    fixed_vs_random_difference, lemma_wj_check_with, omega_one_fixed, one_fixed_output_states,
    type_errors, BinaryPovm, Mode,
};
use crate::error::Result;
use crate::haar::{
    avg_choi_meas_uu, avg_choi_meas_uv, avg_choi_unitary_uu, choi_two_measurements,
    choi_two_unitaries, dephased_swap, difference_j_with, mc_average_choi, sample_haar_unitary,
};
use crate::qcore::{apply_from_choi, CMatrix, QState, Unitary, C64};
use crate::rng::RngStream;

/// Tolerance for the linear-algebra identities.
pub const LINALG_TOL: f64 = 1e-10;
/// Frobenius tolerance for closed form vs Monte Carlo average.
pub const MC_TOL: f64 = 0.05;
/// Slack for the error-mean inequality on random instances.
pub const MARGIN_TOL: f64 = 1e-12;

/// Deliberate corruption used to show that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Replace `T = Δ(S)` by `−T`.
    TSign,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub d_max: usize,
    pub mc_samples: usize,
    pub random_instances: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl VerifyOptions {
    pub fn new(d_max: usize) -> Self {
        VerifyOptions {
            d_max,
            mc_samples: 20_000,
            random_instances: 1_000,
            seed: 0x5eed,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub d: usize,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<28} d={:<2} {}", self.name, self.d, self.detail)
    }
}

fn check(name: &str, d: usize, outcome: Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        name: name.to_string(),
        d,
        passed,
        detail,
    }
}

/// Random density matrix `GG†/Tr(GG†)` from a complex Ginibre `G`.
pub fn random_state(d: usize, rng: &mut RngStream) -> QState {
    let g = ginibre(d, rng);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let rho = gg.scale(1.0 / tr);
    // Symmetrize away rounding so the Hermiticity check is exact.
    let rho = (&rho + &rho.adjoint()).scale(0.5);
    QState::new(rho).expect("Ginibre states are valid")
}

/// Random effect `U diag(λ) U†` with Haar `U` and `λ_i` uniform on `[0, 1]`.
pub fn random_effect(d: usize, rng: &mut RngStream) -> BinaryPovm {
    let u = sample_haar_unitary(d, rng);
    let lambdas: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let m = u.matrix();
    let omega = &(m * &CMatrix::from_real_diag(&lambdas)) * &m.adjoint();
    let omega = (&omega + &omega.adjoint()).scale(0.5);
    BinaryPovm::new(omega).expect("spectrum in [0, 1]")
}

fn ginibre(d: usize, rng: &mut RngStream) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let data: Vec<C64> = (0..d * d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    CMatrix::from_vec(d, d, data).expect("finite Gaussian entries")
}

fn t_matrix(d: usize, fault: Option<Fault>) -> CMatrix {
    let t = dephased_swap(d);
    match fault {
        Some(Fault::TSign) => t.scale(-1.0),
        None => t,
    }
}

/// Smallest margin over `n` random `(ρ₀, ρ₁, Ω)` triples on `d` dims.
pub fn min_random_margin(d: usize, n: usize, rng: &mut RngStream) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for _ in 0..n {
        let rho0 = random_state(d, rng);
        let rho1 = random_state(d, rng);
        let povm = random_effect(d, rng);
        worst = worst.min(error_mean_inequality(&rho0, &rho1, &povm)?);
    }
    Ok(worst)
}

fn mc_checks(opts: &VerifyOptions) -> Vec<CheckResult> {
    let d = 2;
    let n = opts.mc_samples;
    let mut out = Vec::new();
    let mut run =
        |name: &str, stream: u64, two_unitaries: bool, same: bool, reference: Result<CMatrix>| {
            let mut rng = RngStream::new(opts.seed, 0xC0DE + stream);
            let outcome = reference.and_then(|reference| {
                let avg = mc_average_choi(
                    |rng| {
                        let u = sample_haar_unitary(d, rng);
                        let v = if same {
                            u.clone()
                        } else {
                            sample_haar_unitary(d, rng)
                        };
                        Ok(if two_unitaries {
                            choi_two_unitaries(&u, &v)
                        } else {
                            choi_two_measurements(&u, &v)
                        })
                    },
                    n,
                    &mut rng,
                )?;
                let dist = avg.matrix().frobenius_distance(&reference);
                Ok((
                    dist <= MC_TOL,
                    format!("frobenius distance {dist:.4} (n={n}, tol {MC_TOL})"),
                ))
            });
            out.push(check(name, d, outcome));
        };
    run(
        "mc-oracle-unitary-uu",
        0,
        true,
        true,
        avg_choi_unitary_uu(d).map(|a| a.value.into_matrix()),
    );
    run(
        "mc-oracle-meas-uu",
        1,
        false,
        true,
        avg_choi_meas_uu(d).map(|a| a.value.into_matrix()),
    );
    run(
        "mc-oracle-meas-uv",
        2,
        false,
        false,
        avg_choi_meas_uv(d).map(|a| a.value.into_matrix()),
    );
    out
}

fn checks_for_dim(d: usize, opts: &VerifyOptions) -> Vec<CheckResult> {
    let df = d as f64;
    let t = t_matrix(d, opts.fault);
    let mut out = Vec::new();

    out.push(check(
        "analytic-table",
        d,
        (|| {
            let a = analytic_table(Mode::BothUnknown, d)?;
            let b = analytic_table(Mode::OneFixed, d)?;
            let want_a = [0.5 + 0.5 / df, 0.5 - 0.5 / df, 0.0, 1.0 - 1.0 / df];
            let want_b = [1.0 - 0.5 / df, 0.5 / df, 0.0, 1.0 / df];
            let err = [a.p_succ, a.p_err, a.p1, a.p2]
                .iter()
                .zip(want_a)
                .chain([b.p_succ, b.p_err, b.p1, b.p2].iter().zip(want_b))
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok((err <= 1e-12, format!("max deviation {err:.2e}")))
        })(),
    ));

    out.push(check(
        "lemma-wj",
        d,
        Ok({
            let r = lemma_wj_check_with(d, &t);
            (
                r.holds(),
                format!(
                    "residual {:.2e} (tol {:.2e}), W unitarity {:.1e}, hermiticity {:.1e}",
                    r.residual, r.tolerance, r.w_unitarity_defect, r.w_hermiticity_defect
                ),
            )
        }),
    ));

    let j = difference_j_with(d, &t).value;
    out.push(check(
        "both-unknown-upper-bound",
        d,
        diamond_bounds(&j).map(|b| {
            let err = (b.upper - 2.0 / df).abs();
            (
                err <= LINALG_TOL && b.lower <= b.upper + LINALG_TOL,
                format!("upper {:.12} vs 2/d, lower {:.6}", b.upper, b.lower),
            )
        }),
    ));
    out.push(check(
        "both-unknown-saturation",
        d,
        antisymmetric_state(d, 0, 1).and_then(|a| {
            let achieved = achieved_distance(&j, &a.projector())?;
            let err = (achieved - 2.0 / df).abs();
            Ok((
                err <= LINALG_TOL,
                format!("antisymmetric input reaches {achieved:.12}"),
            ))
        }),
    ));
    drop(j);

    out.push(check(
        "one-fixed-bounds",
        d,
        fixed_vs_random_difference(&Unitary::identity(d)).and_then(|j| {
            let b = diamond_bounds(&j)?;
            let want = 2.0 - 2.0 / df;
            let err = (b.lower - want).abs().max((b.upper - want).abs());
            Ok((
                err <= LINALG_TOL,
                format!("lower {:.12}, upper {:.12} vs 2-2/d", b.lower, b.upper),
            ))
        }),
    ));

    out.push(check(
        "structural-zero-both-unknown",
        d,
        (|| {
            let anti = antisymmetric_state(d, 0, 1)?.projector();
            let rho0 = QState::new(apply_from_choi(&avg_choi_meas_uu(d)?.value, anti.matrix())?)?;
            let rho1 = QState::new(apply_from_choi(&avg_choi_meas_uv(d)?.value, anti.matrix())?)?;
            let omega = BinaryPovm::new(&CMatrix::identity(d * d) - &t)?;
            let e = type_errors(&rho0, &rho1, &omega)?;
            let margin = error_mean_inequality(&rho0, &rho1, &omega)?;
            let ok = e.p1 <= 1e-12 && (e.p2 - (1.0 - 1.0 / df)).abs() <= LINALG_TOL;
            Ok((
                ok && margin.abs() <= LINALG_TOL,
                format!(
                    "p1 {:.1e}, p2 {:.12}, helstrom gap {margin:.1e}",
                    e.p1, e.p2
                ),
            ))
        })(),
    ));

    out.push(check(
        "structural-zero-one-fixed",
        d,
        (|| {
            let mut rng = RngStream::new(opts.seed, 0xF1 + d as u64);
            let u = sample_haar_unitary(d, &mut rng);
            let (rho0, rho1) = one_fixed_output_states(&u)?;
            let omega = omega_one_fixed(&u)?;
            let e = type_errors(&rho0, &rho1, &omega)?;
            let margin = error_mean_inequality(&rho0, &rho1, &omega)?;
            let ok = e.p1 <= 1e-12 && (e.p2 - 1.0 / df).abs() <= LINALG_TOL;
            Ok((
                ok && margin.abs() <= LINALG_TOL,
                format!(
                    "p1 {:.1e}, p2 {:.12}, helstrom gap {margin:.1e}",
                    e.p1, e.p2
                ),
            ))
        })(),
    ));

    if d <= 4 {
        out.push(check(
            "error-mean-inequality",
            d,
            (|| {
                let mut rng = RngStream::new(opts.seed, 0xAB00 + d as u64);
                let worst = min_random_margin(d, opts.random_instances, &mut rng)?;
                Ok((
                    worst >= -MARGIN_TOL,
                    format!(
                        "min margin {worst:.3e} over {} instances",
                        opts.random_instances
                    ),
                ))
            })(),
        ));
    }
    out
}

/// Runs every check for `d = 2..=d_max` plus the Monte Carlo oracle at `d = 2`.
pub fn run_verification(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut results = Vec::new();
    for d in 2..=opts.d_max {
        results.extend(checks_for_dim(d, opts));
    }
    if opts.d_max >= 2 {
        results.extend(mc_checks(opts));
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let mut opts = VerifyOptions::new(3);
        opts.mc_samples = 20_000;
        opts.random_instances = 200;
        let results = run_verification(&opts);
        for r in &results {
            assert!(r.passed, "{r}");
        }
        assert!(results.iter().any(|r| r.name == "mc-oracle-meas-uv"));
    }

    #[test]
    fn t_sign_fault_is_detected() {
        let mut opts = VerifyOptions::new(2);
        opts.mc_samples = 10;
        opts.random_instances = 10;
        opts.fault = Some(Fault::TSign);
        let results = run_verification(&opts);
        let failed: Vec<&str> = results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.as_str())
            .collect();
        assert!(failed.contains(&"lemma-wj"), "{failed:?}");
        assert!(failed.contains(&"both-unknown-upper-bound"), "{failed:?}");
        assert!(
            failed.contains(&"structural-zero-both-unknown"),
            "{failed:?}"
        );
    }

    #[test]
    fn random_helpers_respect_invariants() {
        let mut rng = RngStream::new(1, 1);
        for d in 2..=4 {
            let rho = random_state(d, &mut rng);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            let e = random_effect(d, &mut rng);
            assert_eq!(e.dim(), d);
        }
    }
}
