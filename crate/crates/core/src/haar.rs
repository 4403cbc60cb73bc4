//! Haar-random unitaries and closed-form Haar-averaged Choi matrices.
//!
//! The two-copy averages act on `X ⊗ Y` and are stored output pair first,
//! `(X'Y') ⊗ (XY)`, so every formula below is a sum of `A ⊗ B` with `A` on
//! the outputs and `B` on the inputs, each drawn from `{1, S, T}` on `d²` dims
//! where `S` is the swap and `T = Δ(S)`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    choi_of_measurement, dephase, kron, swap_operator, CMatrix, ChoiMatrix, Unitary,
    VonNeumannMeasurement, C64,
};
use crate::rng::RngStream;

/// Haar-distributed unitary: complex Ginibre matrix, QR, then the columns of
/// `Q` multiplied by the phases of `diag(R)` so that `R` has positive diagonal.
pub fn sample_haar_unitary(d: usize, rng: &mut RngStream) -> Unitary {
    assert!(d >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = nalgebra::DMatrix::<C64>::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new(CMatrix::from_nalgebra(&q)).expect("QR factor is unitary")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragedKind {
    UnitaryUu,
    UnitaryUv,
    MeasurementUu,
    MeasurementUv,
    DifferenceJ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedChoi {
    pub kind: AveragedKind,
    pub dim: usize,
    pub value: ChoiMatrix,
}

/// `T = Δ(S)`: the projector onto `span{|ii⟩}`.
pub fn dephased_swap(d: usize) -> CMatrix {
    dephase(&swap_operator(d)).expect("swap is square")
}

/// `Σ_k c_k A_k ⊗ B_k`, visiting only nonzero entries of the factors.
fn tensor_sum(terms: &[(f64, &CMatrix, &CMatrix)]) -> CMatrix {
    let (na, nb) = (terms[0].1.rows(), terms[0].2.rows());
    let n = na * nb;
    let mut out = CMatrix::zeros(n, n);
    let nonzeros = |m: &CMatrix| -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != C64::new(0.0, 0.0) {
                    v.push((i, j, z));
                }
            }
        }
        v
    };
    for &(c, a, b) in terms {
        let bz = nonzeros(b);
        for (r1, c1, x) in nonzeros(a) {
            for &(r2, c2, y) in &bz {
                out[(r1 * nb + r2, c1 * nb + c2)] += x * y * c;
            }
        }
    }
    out
}

fn require_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        Err(Error::DimensionTooSmall { min, got: d })
    } else {
        Ok(())
    }
}

fn averaged(kind: AveragedKind, d: usize, j: CMatrix) -> AveragedChoi {
    AveragedChoi {
        kind,
        dim: d,
        value: ChoiMatrix::new(j, d * d, d * d).expect("d^4 square"),
    }
}

/// `J(∫ Φ_U ⊗ Φ_U dU) = (1⊗1 + S⊗S)/(d²−1) − (S⊗1 + 1⊗S)/(d(d²−1))`.
pub fn avg_choi_unitary_uu(d: usize) -> Result<AveragedChoi> {
    require_dim(d, 2)?;
    let df = d as f64;
    let (one, s) = (CMatrix::identity(d * d), swap_operator(d));
    let a = 1.0 / (df * df - 1.0);
    let b = -1.0 / (df * (df * df - 1.0));
    let j = tensor_sum(&[(a, &one, &one), (a, &s, &s), (b, &s, &one), (b, &one, &s)]);
    Ok(averaged(AveragedKind::UnitaryUu, d, j))
}

/// `J(∫∫ Φ_U ⊗ Φ_V dU dV) = 1⊗1 / d²`.
pub fn avg_choi_unitary_uv(d: usize) -> Result<AveragedChoi> {
    require_dim(d, 1)?;
    let n = d * d * d * d;
    let j = CMatrix::identity(n).scale(1.0 / (d * d) as f64);
    Ok(averaged(AveragedKind::UnitaryUv, d, j))
}

/// `J(∫ P_U ⊗ P_U dU) = [1⊗(1 − S/d) + T⊗(S − 1/d)]/(d²−1)`.
pub fn avg_choi_meas_uu(d: usize) -> Result<AveragedChoi> {
    require_dim(d, 2)?;
    let df = d as f64;
    let (one, s, t) = (CMatrix::identity(d * d), swap_operator(d), dephased_swap(d));
    let a = 1.0 / (df * df - 1.0);
    let j = tensor_sum(&[
        (a, &one, &one),
        (-a / df, &one, &s),
        (a, &t, &s),
        (-a / df, &t, &one),
    ]);
    Ok(averaged(AveragedKind::MeasurementUu, d, j))
}

/// `J(∫∫ P_U ⊗ P_V dU dV) = 1⊗1 / d²`.
pub fn avg_choi_meas_uv(d: usize) -> Result<AveragedChoi> {
    let mut a = avg_choi_unitary_uv(d)?;
    a.kind = AveragedKind::MeasurementUv;
    Ok(a)
}

/// `J = [1⊗(1/d² − S/d) + T⊗(S − 1/d)]/(d²−1)`, the difference of the two
/// averaged measurement Choi matrices.
pub fn choi_difference_j(d: usize) -> Result<AveragedChoi> {
    require_dim(d, 2)?;
    Ok(difference_j_with(d, &dephased_swap(d)))
}

/// Same formula with a caller-supplied `T`; used to check that the
/// verification suite notices a corrupted `T`.
pub(crate) fn difference_j_with(d: usize, t: &CMatrix) -> AveragedChoi {
    let df = d as f64;
    let (one, s) = (CMatrix::identity(d * d), swap_operator(d));
    let a = 1.0 / (df * df - 1.0);
    let j = tensor_sum(&[
        (a / (df * df), &one, &one),
        (-a / df, &one, &s),
        (a, t, &s),
        (-a / df, t, &one),
    ]);
    averaged(AveragedKind::DifferenceJ, d, j)
}

/// `J(∫ P_V dV) = 1/d`: the averaged single measurement is the depolarizing channel.
pub fn avg_choi_meas_single(d: usize) -> Result<ChoiMatrix> {
    require_dim(d, 1)?;
    ChoiMatrix::new(CMatrix::identity(d * d).scale(1.0 / d as f64), d, d)
}

/// `J(Φ_U ⊗ Φ_V) = |U⊗V⟩⟩⟨⟨U⊗V|` in `(X'Y') ⊗ (XY)` order.
pub fn choi_two_unitaries(u: &Unitary, v: &Unitary) -> ChoiMatrix {
    let uv = kron(u.matrix(), v.matrix());
    let n = uv.rows();
    ChoiMatrix::new(CMatrix::outer(uv.as_slice(), uv.as_slice()), n, n).expect("square")
}

/// `J(P_U ⊗ P_V) = Σ_{ij} |ij⟩⟨ij| ⊗ |ū_i⟩⟨ū_i| ⊗ |v̄_j⟩⟨v̄_j|` in `(X'Y') ⊗ (XY)` order.
pub fn choi_two_measurements(u: &Unitary, v: &Unitary) -> ChoiMatrix {
    let ju = choi_of_measurement(&VonNeumannMeasurement::new(u.clone()));
    let jv = choi_of_measurement(&VonNeumannMeasurement::new(v.clone()));
    let (du, dv) = (u.dim(), v.dim());
    ChoiMatrix::new(
        reorder_product_choi(ju.matrix(), jv.matrix(), du, dv),
        du * dv,
        du * dv,
    )
    .expect("square")
}

/// Permutes `J_X ⊗ J_Y` from `X'X Y'Y` order into `X'Y' XY` order.
fn reorder_product_choi(jx: &CMatrix, jy: &CMatrix, dx: usize, dy: usize) -> CMatrix {
    let prod = kron(jx, jy);
    let n = dx * dx * dy * dy;
    // (x', x, y', y) -> (x', y', x, y)
    let perm = |idx: usize| -> usize {
        let y = idx % dy;
        let yp = (idx / dy) % dy;
        let x = (idx / (dy * dy)) % dx;
        let xp = idx / (dy * dy * dx);
        ((xp * dy + yp) * dx + x) * dy + y
    };
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for (c, &z) in prod.row(r).iter().enumerate() {
            out[(perm(r), perm(c))] = z;
        }
    }
    out
}

/// Arithmetic mean of `n` sampled Choi matrices.
pub fn mc_average_choi<F>(mut sampler: F, n: usize, rng: &mut RngStream) -> Result<ChoiMatrix>
where
    F: FnMut(&mut RngStream) -> Result<ChoiMatrix>,
{
    if n == 0 {
        return Err(Error::InvalidConfig {
            field: "n",
            reason: "need at least one sample".into(),
        });
    }
    let first = sampler(rng)?;
    let (dim_in, dim_out) = (first.dim_in(), first.dim_out());
    let mut acc = first.into_matrix();
    for _ in 1..n {
        let next = sampler(rng)?;
        if next.dim_in() != dim_in || next.dim_out() != dim_out {
            return Err(Error::dims("sampler changed Choi dimensions"));
        }
        for (a, b) in acc.as_mut_slice().iter_mut().zip(next.matrix().as_slice()) {
            *a += b;
        }
    }
    ChoiMatrix::new(acc.scale(1.0 / n as f64), dim_in, dim_out)
}
