//! Tensor-product plumbing and the canonical channels.

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Row-major vectorization: component `i * cols + j` is `X[i, j]`,
/// so `vec(1_d) = Σ_i |i⟩|i⟩`.
pub fn vec(x: &CMatrix) -> Vec<C64> {
    x.as_slice().to_vec()
}

/// Inverse of [`vec`].
pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<CMatrix> {
    CMatrix::from_vec(rows, cols, v.to_vec())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    let cols = ac * bc;
    let data = out.as_mut_slice();
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                let base = (i * br + k) * cols + j * bc;
                for (o, &y) in data[base..base + bc].iter_mut().zip(b.row(k)) {
                    *o = s * y;
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, f| kron(&acc, f))
}

/// Reduced matrix on the factors listed in `keep` (in increasing order).
/// An empty `keep` yields the 1x1 total trace.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "partial trace of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dims("factor dimensions must be positive"));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::dims(format!(
            "factor dims {dims:?} give {total}, matrix is {}",
            m.rows()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidIndex(format!(
            "factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    // Stride of each factor in the full index.
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let n: usize = factors.iter().map(|&k| dims[k]).product();
        (0..n)
            .map(|mut idx| {
                let mut off = 0;
                for &k in factors.iter().rev() {
                    off += (idx % dims[k]) * strides[k];
                    idx /= dims[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    let mut out = CMatrix::zeros(n, n);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| m[(ro + t, co + t)]).sum();
        }
    }
    Ok(out)
}

/// `S |i⟩|j⟩ = |j⟩|i⟩` on two `d`-dimensional factors.
pub fn swap_operator(d: usize) -> CMatrix {
    assert!(d >= 1, "swap_operator needs d >= 1");
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = ONE;
        }
    }
    s
}

/// Dephasing channel: keeps only the diagonal.
pub fn dephase(x: &CMatrix) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::dims("dephasing needs a square matrix"));
    }
    Ok(CMatrix::from_diag(&x.diagonal()))
}

/// Completely depolarizing channel `X ↦ Tr(X) 1/d`.
pub fn depolarize(x: &CMatrix, d: usize) -> Result<CMatrix> {
    if x.rows() != d || x.cols() != d {
        return Err(Error::dims(format!(
            "depolarize on {d} dims got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(CMatrix::identity(d).scale_c(x.trace() / d as f64))
}

/// `|1⟩⟩⟨⟨1|` on `d ⊗ d`.
pub fn max_entangled_projector(d: usize) -> CMatrix {
    let v = vec(&CMatrix::identity(d));
    CMatrix::outer(&v, &v)
}
