//! Choi–Jamiołkowski representation and channel actions.
//!
//! Choi matrices are unnormalized (`Tr J = d_in` for trace-preserving maps)
//! and ordered output factor first: `J = Σ_{ij} Ψ(|i⟩⟨j|) ⊗ |i⟩⟨j|`.

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64, ONE, ZERO};
use super::norms::HermitianEigen;
use super::ops::{dephase, partial_trace};
use super::state::{QState, Unitary, VonNeumannMeasurement};
use super::{TAU_CPTP, TAU_HERM};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    j: CMatrix,
}

impl ChoiMatrix {
    pub fn new(j: CMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = dim_in * dim_out;
        if dim_in == 0 || dim_out == 0 || j.rows() != n || j.cols() != n {
            return Err(Error::dims(format!(
                "Choi matrix {}x{} for dim_out {dim_out} and dim_in {dim_in}",
                j.rows(),
                j.cols()
            )));
        }
        Ok(ChoiMatrix { dim_in, dim_out, j })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.j
    }

    pub fn into_matrix(self) -> CMatrix {
        self.j
    }

    /// Entrywise difference; both maps must share input and output dims.
    pub fn difference(&self, other: &ChoiMatrix) -> Result<ChoiMatrix> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::dims("Choi matrices act on different spaces"));
        }
        ChoiMatrix::new(self.j.try_sub(&other.j)?, self.dim_in, self.dim_out)
    }

    /// `Tr_out J`, which is the identity on the input for trace-preserving maps.
    pub fn output_marginal(&self) -> CMatrix {
        partial_trace(&self.j, &[self.dim_out, self.dim_in], &[1]).expect("consistent dims")
    }

    /// Composes the map with dephasing on its output, `(Δ ⊗ 1)(J)`.
    pub fn dephase_output(&self) -> ChoiMatrix {
        let mut out = self.j.clone();
        let n_in = self.dim_in;
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                if r / n_in != c / n_in {
                    out[(r, c)] = ZERO;
                }
            }
        }
        ChoiMatrix { j: out, ..*self }
    }

    /// Largest violation of the CPTP conditions: Hermiticity, positivity and
    /// `Tr_out J = 1`.
    pub fn cptp_defect(&self) -> f64 {
        let herm = self.j.hermiticity_defect();
        if herm > TAU_HERM {
            return herm;
        }
        let min_eig = HermitianEigen::new(&self.j)
            .map(|e| e.eigenvalues().first().copied().unwrap_or(0.0))
            .unwrap_or(f64::NEG_INFINITY);
        let tp = self
            .output_marginal()
            .max_abs_diff(&CMatrix::identity(self.dim_in));
        herm.max((-min_eig).max(0.0)).max(tp)
    }

    pub fn is_cptp(&self) -> bool {
        self.cptp_defect() <= TAU_CPTP
    }
}

/// `J(Ψ) = Σ_{ij} Ψ(|i⟩⟨j|) ⊗ |i⟩⟨j|` for a linear map given as a closure.
pub fn choi_of_map<F>(apply: F, dim_in: usize, dim_out: usize) -> Result<ChoiMatrix>
where
    F: Fn(&CMatrix) -> Result<CMatrix>,
{
    let n = dim_in * dim_out;
    let mut j = CMatrix::zeros(n, n);
    for a in 0..dim_in {
        for b in 0..dim_in {
            let mut e = CMatrix::zeros(dim_in, dim_in);
            e[(a, b)] = ONE;
            let img = apply(&e)?;
            if img.rows() != dim_out || img.cols() != dim_out {
                return Err(Error::dims(format!(
                    "map returned {}x{}, expected {dim_out}x{dim_out}",
                    img.rows(),
                    img.cols()
                )));
            }
            for r in 0..dim_out {
                for c in 0..dim_out {
                    j[(r * dim_in + a, c * dim_in + b)] = img[(r, c)];
                }
            }
        }
    }
    ChoiMatrix::new(j, dim_in, dim_out)
}

/// `Ψ(ρ) = Tr_in[J (1_out ⊗ ρ^⊤)]` with the plain transpose.
pub fn apply_from_choi(choi: &ChoiMatrix, rho: &CMatrix) -> Result<CMatrix> {
    let (n_in, n_out) = (choi.dim_in, choi.dim_out);
    if rho.rows() != n_in || rho.cols() != n_in {
        return Err(Error::dims(format!(
            "input {}x{} for a map on {n_in} dims",
            rho.rows(),
            rho.cols()
        )));
    }
    // [J(1 ⊗ ρ^⊤)]_{(a,k),(b,k)} = Σ_l J_{(a,k),(b,l)} ρ_{k,l}
    let j = &choi.j;
    let mut out = CMatrix::zeros(n_out, n_out);
    for a in 0..n_out {
        for b in 0..n_out {
            let mut acc = ZERO;
            for k in 0..n_in {
                let row = j.row(a * n_in + k);
                let slice = &row[b * n_in..(b + 1) * n_in];
                for (l, &x) in slice.iter().enumerate() {
                    if x != ZERO {
                        acc += x * rho[(k, l)];
                    }
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// `(Ψ ⊗ 1)(ρ)` for `ρ` on `d_in ⊗ d_anc`, computed from the Choi matrix of `Ψ`.
pub fn apply_choi_on_first_factor(
    choi: &ChoiMatrix,
    rho: &CMatrix,
    d_anc: usize,
) -> Result<CMatrix> {
    let (n_in, n_out) = (choi.dim_in, choi.dim_out);
    if d_anc == 0 || rho.rows() != n_in * d_anc || rho.cols() != n_in * d_anc {
        return Err(Error::dims(format!(
            "input {}x{} for a map on {n_in} dims with a {d_anc}-dim ancilla",
            rho.rows(),
            rho.cols()
        )));
    }
    // out[(a,y),(b,y')] = Σ_{k,l} J[(a,k),(b,l)] ρ[(k,y),(l,y')]
    let j = &choi.j;
    let mut out = CMatrix::zeros(n_out * d_anc, n_out * d_anc);
    for a in 0..n_out {
        for k in 0..n_in {
            for b in 0..n_out {
                for l in 0..n_in {
                    let x = j[(a * n_in + k, b * n_in + l)];
                    if x == ZERO {
                        continue;
                    }
                    for y in 0..d_anc {
                        for yp in 0..d_anc {
                            out[(a * d_anc + y, b * d_anc + yp)] +=
                                x * rho[(k * d_anc + y, l * d_anc + yp)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Φ_U(X) = U X U†`.
pub fn unitary_channel(u: &Unitary, x: &CMatrix) -> Result<CMatrix> {
    let m = u.matrix();
    m.matmul(x)?.matmul(&m.adjoint())
}

/// `J(Φ_U) = |U⟩⟩⟨⟨U|`.
pub fn choi_of_unitary(u: &Unitary) -> ChoiMatrix {
    let v = u.matrix().as_slice();
    let d = u.dim();
    ChoiMatrix::new(CMatrix::outer(v, v), d, d).expect("square unitary")
}

/// `P_U(X) = Σ_i |i⟩⟨i| ⟨u_i|X|u_i⟩` on arbitrary (not necessarily state) inputs.
pub fn vn_measure_map(p: &VonNeumannMeasurement, x: &CMatrix) -> Result<CMatrix> {
    let probs = p.probabilities_complex(x)?;
    Ok(CMatrix::from_diag(&probs))
}

/// Measurement as a channel: output is the diagonal matrix of label probabilities.
pub fn vn_measure_channel(p: &VonNeumannMeasurement, rho: &QState) -> Result<QState> {
    let probs = p.probabilities(rho.matrix())?;
    QState::new(CMatrix::from_real_diag(&probs))
}

/// `J(P_U) = Σ_i |i⟩⟨i| ⊗ |ū_i⟩⟨ū_i|`.
pub fn choi_of_measurement(p: &VonNeumannMeasurement) -> ChoiMatrix {
    let d = p.dim();
    let mut j = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        let ubar: Vec<C64> = p.basis().column(i).iter().map(|z| z.conj()).collect();
        for a in 0..d {
            for b in 0..d {
                j[(i * d + a, i * d + b)] = ubar[a] * ubar[b].conj();
            }
        }
    }
    ChoiMatrix::new(j, d, d).expect("consistent dims")
}

/// Choi matrix of the dephasing channel on `d` dims.
pub fn choi_of_dephasing(d: usize) -> ChoiMatrix {
    choi_of_map(dephase, d, d).expect("dephasing is well defined")
}

impl VonNeumannMeasurement {
    fn probabilities_complex(&self, x: &CMatrix) -> Result<Vec<C64>> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::dims(format!(
                "measurement on {d} dims got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        Ok((0..d)
            .map(|i| {
                let u = self.basis().column(i);
                let xu = x.mul_vec(&u).expect("checked shape");
                u.iter().zip(&xu).map(|(a, b)| a.conj() * b).sum()
            })
            .collect())
    }
}
