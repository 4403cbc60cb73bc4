//! Diamond-norm bounds and the optimal strategies for both games.
//!
//! Also holds the Helstrom probabilities and the closed-form summary rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{
    avg_choi_meas_single, avg_choi_meas_uu, avg_choi_meas_uv, choi_difference_j, dephased_swap,
    difference_j_with,
};
use crate::qcore::{
    abs_hermitian, apply_choi_on_first_factor, apply_from_choi, choi_of_measurement, kron,
    max_entangled_projector, operator_norm, partial_trace, swap_operator, trace_norm, CMatrix,
    ChoiMatrix, HermitianEigen, PureState, QState, Unitary, VonNeumannMeasurement, C64, TAU_HERM,
    TAU_PSD,
};

/// Slack allowed outside `[0, 1]` before a probability counts as broken.
pub const PROB_SLACK: f64 = 1e-12;

/// Which game is played.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Reference and tested measurement both come without description.
    BothUnknown,
    /// Reference measurement is a known `P_U`.
    OneFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Symmetric,
    Asymmetric,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::BothUnknown, Mode::OneFixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BothUnknown => "both-unknown",
            Mode::OneFixed => "one-fixed",
        }
    }
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Symmetric, Scheme::Asymmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Symmetric => "symmetric",
            Scheme::Asymmetric => "asymmetric",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "both-unknown" => Ok(Mode::BothUnknown),
            "one-fixed" => Ok(Mode::OneFixed),
            other => Err(format!(
                "unknown mode `{other}` (expected both-unknown or one-fixed)"
            )),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "symmetric" => Ok(Scheme::Symmetric),
            "asymmetric" => Ok(Scheme::Asymmetric),
            other => Err(format!(
                "unknown scheme `{other}` (expected symmetric or asymmetric)"
            )),
        }
    }
}

/// Two-outcome measurement `{Ω, 1 − Ω}`; `Ω` accepts the null hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPovm {
    omega: CMatrix,
}

impl BinaryPovm {
    pub fn new(omega: CMatrix) -> Result<Self> {
        if !omega.is_square() {
            return Err(Error::dims("effect must be square"));
        }
        let eig = HermitianEigen::new(&omega)?;
        let vals = eig.eigenvalues();
        let (lo, hi) = (vals[0], vals[vals.len() - 1]);
        if lo < -TAU_PSD || hi > 1.0 + TAU_PSD {
            return Err(Error::InvalidEffect(format!(
                "eigenvalues span [{lo:.3e}, {hi:.3e}], outside [0, 1]"
            )));
        }
        Ok(BinaryPovm { omega })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    /// `Tr(Ω ρ)`: probability of accepting the null hypothesis.
    pub fn accept_probability(&self, rho: &QState) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::dims(format!(
                "state on {} dims, effect on {}",
                rho.dim(),
                self.dim()
            )));
        }
        Ok(self.omega.trace_product(rho.matrix())?.re)
    }
}

/// Type I (false positive) and type II (false negative) error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `(1/d_in)‖J‖₁ ≤ ‖Ψ‖◇ ≤ ‖Tr_out |J|‖` for a Hermitian Choi matrix.
pub fn diamond_bounds(j: &ChoiMatrix) -> Result<DiamondBounds> {
    let m = j.matrix();
    let defect = m.hermiticity_defect();
    if defect > TAU_HERM {
        return Err(Error::NotHermitian(defect));
    }
    let lower = trace_norm(m) / j.dim_in() as f64;
    let abs = abs_hermitian(m)?;
    let marginal = partial_trace(&abs, &[j.dim_out(), j.dim_in()], &[1])?;
    let upper = operator_norm(&marginal);
    Ok(DiamondBounds { lower, upper })
}

fn check_diamond(value: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&value) {
        return Err(Error::Probability(format!(
            "diamond-norm distance {value} outside [0, 2]"
        )));
    }
    Ok(())
}

/// Holevo–Helstrom optimum `1/2 + ‖Ψ₀ − Ψ₁‖◇/4` for equal priors.
pub fn helstrom_success(diamond_value: f64) -> Result<f64> {
    check_diamond(diamond_value)?;
    Ok(0.5 + diamond_value / 4.0)
}

/// `1 − helstrom_success`.
pub fn helstrom_error(diamond_value: f64) -> Result<f64> {
    check_diamond(diamond_value)?;
    Ok(0.5 - diamond_value / 4.0)
}

/// `(|ij⟩ − |ji⟩)/√2` on `d ⊗ d`.
pub fn antisymmetric_state(d: usize, i: usize, j: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    if i >= j || j >= d {
        return Err(Error::InvalidIndex(format!(
            "need 0 ≤ i < j < d, got i={i}, j={j}, d={d}"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    amps[i * d + j] = C64::new(h, 0.0);
    amps[j * d + i] = C64::new(-h, 0.0);
    PureState::new(amps)
}

/// `(1/d)|1⟩⟩⟨⟨1|` on `d ⊗ d`.
pub fn max_entangled_input(d: usize) -> QState {
    QState::new(max_entangled_projector(d).scale(1.0 / d as f64)).expect("normalized projector")
}

/// `Ω = 1 − T`: accept when the two labels differ.
pub fn omega_both_unknown(d: usize) -> Result<BinaryPovm> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    BinaryPovm::new(&CMatrix::identity(d * d) - &dephased_swap(d))
}

/// `Ω = Σ_i |i⟩⟨i| ⊗ (|u_i⟩⟨u_i|)^⊤`: accept when the ancilla lands on `ū_i`.
pub fn omega_one_fixed(u: &Unitary) -> Result<BinaryPovm> {
    let d = u.dim();
    let mut omega = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        let col = u.column(i);
        for a in 0..d {
            for b in 0..d {
                // (|u⟩⟨u|)^⊤_{ab} = u_b conj(u_a)
                omega[(i * d + a, i * d + b)] = col[b] * col[a].conj();
            }
        }
    }
    BinaryPovm::new(omega)
}

fn clamp_probability(p: f64, what: &str) -> Result<f64> {
    if (-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        Ok(p.clamp(0.0, 1.0))
    } else {
        Err(Error::Probability(format!("{what} = {p}")))
    }
}

/// `p_I = 1 − Tr(Ω ρ₀)`, `p_II = Tr(Ω ρ₁)`.
pub fn type_errors(rho0: &QState, rho1: &QState, povm: &BinaryPovm) -> Result<ErrorPair> {
    let p1 = 1.0 - povm.accept_probability(rho0)?;
    let p2 = povm.accept_probability(rho1)?;
    Ok(ErrorPair {
        p1: clamp_probability(p1, "p1")?,
        p2: clamp_probability(p2, "p2")?,
    })
}

/// `‖Ψ(ρ)‖₁` where `Ψ` is the map with Choi matrix `j` and no ancilla is used.
pub fn achieved_distance(j: &ChoiMatrix, rho: &QState) -> Result<f64> {
    Ok(trace_norm(&apply_from_choi(j, rho.matrix())?))
}

/// Result of checking `(WJ)² = J²` with `W = (2T − 1) ⊗ S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub d: usize,
    /// `‖(WJ)² − J²‖_F`.
    pub residual: f64,
    /// `1e-10 · (1 + ‖J²‖_F)`.
    pub tolerance: f64,
    pub w_unitarity_defect: f64,
    pub w_hermiticity_defect: f64,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.residual <= self.tolerance
            && self.w_unitarity_defect <= 1e-12
            && self.w_hermiticity_defect <= 1e-12
    }
}

pub fn lemma_wj_check(d: usize) -> Result<LemmaReport> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    Ok(lemma_wj_check_with(d, &dephased_swap(d)))
}

pub(crate) fn lemma_wj_check_with(d: usize, t: &CMatrix) -> LemmaReport {
    let n = d * d;
    let sign = &t.scale(2.0) - &CMatrix::identity(n);
    let w = kron(&sign, &swap_operator(d));
    let w_hermiticity_defect = w.hermiticity_defect();
    let w_unitarity_defect = w.unitarity_defect();

    let j = difference_j_with(d, t).value.into_matrix();
    let wj = &w * &j;
    drop(w);
    let wj2 = &wj * &wj;
    drop(wj);
    let j2 = &j * &j;
    drop(j);
    let residual = wj2.frobenius_distance(&j2);
    LemmaReport {
        d,
        residual,
        tolerance: 1e-10 * (1.0 + j2.frobenius_norm()),
        w_unitarity_defect,
        w_hermiticity_defect,
    }
}

/// `(p_I + p_II)/2 − p_e^H`, where `p_e^H = 1/2 − ‖ρ₀ − ρ₁‖₁/4` is the
/// Helstrom error for the supplied pair. Never negative up to rounding.
pub fn error_mean_inequality(rho0: &QState, rho1: &QState, povm: &BinaryPovm) -> Result<f64> {
    let errs = type_errors(rho0, rho1, povm)?;
    let diff = rho0.matrix().try_sub(rho1.matrix())?;
    let helstrom = 0.5 - trace_norm(&diff) / 4.0;
    Ok(0.5 * (errs.p1 + errs.p2) - helstrom)
}

/// One row of the closed-form summary table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub mode: Mode,
    pub d: usize,
    pub p_succ: f64,
    pub p_err: f64,
    pub p1: f64,
    pub p2: f64,
    pub ancilla_needed: bool,
}

impl AnalyticRow {
    /// Optimal diamond-norm distance implied by `p_succ`.
    pub fn diamond(&self) -> f64 {
        4.0 * (self.p_succ - 0.5)
    }
}

pub fn analytic_table(mode: Mode, d: usize) -> Result<AnalyticRow> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    let inv = 1.0 / d as f64;
    let row = match mode {
        Mode::BothUnknown => AnalyticRow {
            mode,
            d,
            p_succ: 0.5 + 0.5 * inv,
            p_err: 0.5 - 0.5 * inv,
            p1: 0.0,
            p2: 1.0 - inv,
            ancilla_needed: false,
        },
        Mode::OneFixed => AnalyticRow {
            mode,
            d,
            p_succ: 1.0 - 0.5 * inv,
            p_err: 0.5 * inv,
            p1: 0.0,
            p2: inv,
            ancilla_needed: true,
        },
    };
    Ok(row)
}

/// `J(P_U) − J(∫ P_V dV)` for the one-fixed game.
pub fn fixed_vs_random_difference(u: &Unitary) -> Result<ChoiMatrix> {
    let d = u.dim();
    choi_of_measurement(&VonNeumannMeasurement::new(u.clone()))
        .difference(&avg_choi_meas_single(d)?)
}

/// Conjugates a `d ⊗ d` Choi matrix by `1 ⊗ U^⊤`, which carries
/// `J(P_U)` to `J(P_1)` and leaves `1/d` fixed.
pub fn to_canonical_frame(j: &ChoiMatrix, u: &Unitary) -> Result<ChoiMatrix> {
    let d = u.dim();
    if j.dim_in() != d || j.dim_out() != d {
        return Err(Error::dims("frame change needs a d ⊗ d Choi matrix"));
    }
    let local = kron(&CMatrix::identity(d), &u.matrix().transpose());
    let rotated = local.matmul(j.matrix())?.matmul(&local.adjoint())?;
    ChoiMatrix::new(rotated, d, d)
}

/// Diamond bounds for the one-fixed game, evaluated in the `U = 1` frame.
pub fn one_fixed_diamond_bounds(u: &Unitary) -> Result<DiamondBounds> {
    let canonical = to_canonical_frame(&fixed_vs_random_difference(u)?, u)?;
    diamond_bounds(&canonical)
}

/// Output states of the both-unknown game on the antisymmetric input `(i, j)`.
pub fn both_unknown_output_states(d: usize, i: usize, j: usize) -> Result<(QState, QState)> {
    let rho = antisymmetric_state(d, i, j)?.projector();
    let rho0 = apply_from_choi(&avg_choi_meas_uu(d)?.value, rho.matrix())?;
    let rho1 = apply_from_choi(&avg_choi_meas_uv(d)?.value, rho.matrix())?;
    Ok((QState::new(rho0)?, QState::new(rho1)?))
}

/// Output states of the one-fixed game on `(1/d)|1⟩⟩⟨⟨1|`: the box acts on the
/// first factor, the second is the ancilla.
pub fn one_fixed_output_states(u: &Unitary) -> Result<(QState, QState)> {
    let d = u.dim();
    let psi = max_entangled_input(d);
    let j0 = choi_of_measurement(&VonNeumannMeasurement::new(u.clone()));
    let rho0 = apply_choi_on_first_factor(&j0, psi.matrix(), d)?;
    let rho1 = apply_choi_on_first_factor(&avg_choi_meas_single(d)?, psi.matrix(), d)?;
    Ok((QState::new(rho0)?, QState::new(rho1)?))
}

/// Upper diamond bound for the both-unknown game.
pub fn both_unknown_diamond_bounds(d: usize) -> Result<DiamondBounds> {
    diamond_bounds(&choi_difference_j(d)?.value)
}
