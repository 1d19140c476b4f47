//! Vectorization conventions: column-stacking `vec`, symmetric
//! matricization `mat`, Kronecker products and the linear map
//! U ↦ vec(XUᵀ + UXᵀ).

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Stacks the columns of any matrix into one vector.
pub fn vec_cols(a: &DenseMatrix) -> Vec<f64> {
    let (r, c) = a.shape();
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec_cols`] for a `rows × cols` shape.
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> Result<DenseMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(DenseMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

/// vec of a square matrix (length n²).
pub fn vec(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "vec expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(vec_cols(a))
}

/// Side length of a vector of length n², if it is a perfect square.
pub fn square_side(len: usize) -> Option<usize> {
    let n = (len as f64).sqrt().round() as usize;
    (n * n == len).then_some(n)
}

/// Symmetric matricization: (A + Aᵀ)/2 where vec A = v.
pub fn mat(v: &[f64]) -> Result<DenseMatrix> {
    let n = square_side(v.len()).ok_or_else(|| {
        Error::Dimension(format!("length {} is not a perfect square", v.len()))
    })?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| 0.5 * (v[j * n + i] + v[i * n + j])))
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let mut out = DenseMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors, a ⊗ b.
pub fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// The n² × nr matrix 𝐗 with 𝐗 vec U = vec(XUᵀ + UXᵀ) for U ∈ ℝ^{n×r}.
pub fn x_operator(x: &DenseMatrix) -> DenseMatrix {
    let (n, r) = x.shape();
    let mut op = DenseMatrix::zeros(n * n, n * r);
    for c in 0..r {
        for i in 0..n {
            let col = c * n + i;
            // U = E_ic: (XUᵀ)[p, i] = X[p, c] and (UXᵀ)[i, q] = X[q, c]
            for p in 0..n {
                op[(i * n + p, col)] += x[(p, c)];
                op[(p * n + i, col)] += x[(p, c)];
            }
        }
    }
    op
}
