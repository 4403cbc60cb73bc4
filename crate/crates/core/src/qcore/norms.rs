//! Spectral routines: Hermitian eigendecomposition, `|M|`, trace and operator norms.
//!
//! Hermitian inputs are split into the connected components of their
//! nonzero pattern before diagonalizing. Choi matrices of measurements are
//! block diagonal in the output basis, so a `d⁴ x d⁴` matrix typically
//! falls apart into many small blocks.

use nalgebra::linalg::{SymmetricEigen, SVD};

use super::matrix::{CMatrix, C64, ZERO};
use super::TAU_HERM;
use crate::error::{Error, Result};

/// One diagonalized block: `indices` into the full matrix, eigenvalues and
/// column eigenvectors expressed on those indices.
struct Block {
    indices: Vec<usize>,
    values: Vec<f64>,
    vectors: Vec<Vec<C64>>,
}

/// Eigendecomposition of a Hermitian matrix, block by block.
pub struct HermitianEigen {
    dim: usize,
    blocks: Vec<Block>,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > TAU_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let n = m.rows();
        let mut blocks = Vec::new();
        for indices in components(m) {
            if indices.len() == 1 {
                let i = indices[0];
                blocks.push(Block {
                    values: vec![m[(i, i)].re],
                    vectors: vec![vec![C64::new(1.0, 0.0)]],
                    indices,
                });
                continue;
            }
            let k = indices.len();
            let sub = nalgebra::DMatrix::from_fn(k, k, |r, c| {
                // Symmetrize so the solver sees an exactly Hermitian block.
                (m[(indices[r], indices[c])] + m[(indices[c], indices[r])].conj()) * 0.5
            });
            let eig = SymmetricEigen::new(sub);
            let values = eig.eigenvalues.iter().copied().collect();
            let vectors = (0..k)
                .map(|col| eig.eigenvectors.column(col).iter().copied().collect())
                .collect();
            blocks.push(Block {
                indices,
                values,
                vectors,
            });
        }
        Ok(HermitianEigen { dim: n, blocks })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Rebuilds `Σ f(λ) |v⟩⟨v|`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            for (lambda, v) in b.values.iter().zip(&b.vectors) {
                let w = f(*lambda);
                if w == 0.0 {
                    continue;
                }
                for (r, &ir) in b.indices.iter().enumerate() {
                    let vr = v[r] * w;
                    if vr == ZERO {
                        continue;
                    }
                    for (c, &ic) in b.indices.iter().enumerate() {
                        out[(ir, ic)] += vr * v[c].conj();
                    }
                }
            }
        }
        out
    }
}

/// Connected components of the graph with an edge wherever `m[i][j] != 0`.
fn components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for (j, z) in m.row(i).iter().enumerate().skip(i + 1) {
            if *z != ZERO || m[(j, i)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// `|M| = √(M†M)` for Hermitian `M`: same eigenvectors, absolute eigenvalues.
pub fn abs_hermitian(m: &CMatrix) -> Result<CMatrix> {
    Ok(HermitianEigen::new(m)?.reconstruct(f64::abs))
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    SVD::new(m.to_nalgebra(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(TAU_HERM) {
        if let Ok(eig) = HermitianEigen::new(m) {
            return eig.eigenvalues().iter().map(|x| x.abs()).sum();
        }
    }
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_square() && m.is_hermitian(TAU_HERM) {
        if let Ok(eig) = HermitianEigen::new(m) {
            return eig.eigenvalues().iter().fold(0.0, |a, x| a.max(x.abs()));
        }
    }
    singular_values(m).iter().fold(0.0, |a: f64, &x| a.max(x))
}
