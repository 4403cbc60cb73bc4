//! Validated states and von Neumann measurements.

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, C64};
use super::norms::HermitianEigen;
use super::{TAU_HERM, TAU_PSD, TAU_TR, TAU_UNIT};
use crate::error::{Error, Result};

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QState {
    dim: usize,
    rho: CMatrix,
}

impl QState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::dims("density matrix must be square"));
        }
        let defect = rho.hermiticity_defect();
        if defect > TAU_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TAU_TR || tr.im.abs() > TAU_TR {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = HermitianEigen::new(&rho)?
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -TAU_PSD {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(QState {
            dim: rho.rows(),
            rho,
        })
    }

    /// Maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        QState {
            dim,
            rho: CMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }
}

/// Unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::dims("empty state vector"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TAU_TR {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(PureState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> QState {
        QState {
            dim: self.dim(),
            rho: CMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct Unitary {
    u: CMatrix,
}

impl TryFrom<CMatrix> for Unitary {
    type Error = Error;

    fn try_from(u: CMatrix) -> Result<Self> {
        Unitary::new(u)
    }
}

impl From<Unitary> for CMatrix {
    fn from(u: Unitary) -> CMatrix {
        u.u
    }
}

impl Unitary {
    pub fn new(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::dims("unitary must be square"));
        }
        let defect = u.unitarity_defect();
        if defect > TAU_UNIT {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Unitary { u })
    }

    pub fn identity(d: usize) -> Self {
        Unitary {
            u: CMatrix::identity(d),
        }
    }

    /// Discrete Fourier transform `F_{jk} = ω^{jk}/√d`.
    pub fn fourier(d: usize) -> Self {
        let mut u = CMatrix::zeros(d, d);
        let scale = 1.0 / (d as f64).sqrt();
        for j in 0..d {
            for k in 0..d {
                let phase = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
                u[(j, k)] = C64::from_polar(scale, phase);
            }
        }
        Unitary { u }
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            u: self.u.adjoint(),
        }
    }

    /// Product of two unitaries; the result is unitary by construction.
    pub fn compose(&self, other: &Unitary) -> Result<Unitary> {
        Ok(Unitary {
            u: self.u.matmul(&other.u)?,
        })
    }

    /// `|u_i⟩ = U|i⟩`.
    pub fn column(&self, i: usize) -> Vec<C64> {
        self.u.column(i)
    }
}

/// Measurement with effects `|u_i⟩⟨u_i|`, `u_i` the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannMeasurement {
    basis: Unitary,
}

impl VonNeumannMeasurement {
    pub fn new(basis: Unitary) -> Self {
        VonNeumannMeasurement { basis }
    }

    pub fn computational(d: usize) -> Self {
        VonNeumannMeasurement::new(Unitary::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Unitary {
        &self.basis
    }

    pub fn effect(&self, i: usize) -> CMatrix {
        let u = self.basis.column(i);
        CMatrix::outer(&u, &u)
    }

    pub fn effects(&self) -> Vec<CMatrix> {
        (0..self.dim()).map(|i| self.effect(i)).collect()
    }

    /// Label distribution `p(i) = ⟨u_i|ρ|u_i⟩`.
    pub fn probabilities(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        let d = self.dim();
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::dims(format!(
                "measurement on {d} dims got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        Ok((0..d)
            .map(|i| {
                let u = self.basis.column(i);
                let ru = rho.mul_vec(&u).expect("checked shape");
                u.iter().zip(&ru).map(|(a, b)| a.conj() * b).sum::<C64>().re
            })
            .collect())
    }
}
