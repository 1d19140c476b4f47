//! The scaled measurement operator with a known RIP constant and the pair of
//! operators whose Hessians differ by a large bilinear gap.

use crate::error::{Error, Result};
use crate::matrix::{complete_orthonormal, unvec, vec_cols, DenseMatrix};

use super::form::QuadraticForm;

fn check_params(n: usize, r: usize) -> Result<()> {
    if n < 4 || r < 1 || n <= 2 * r {
        return Err(Error::Range(format!("need n ≥ 4, r ≥ 1 and n > 2r, got n={n}, r={r}")));
    }
    Ok(())
}

/// RIP constant r/(n − r) of the tight operator.
pub fn tight_delta(n: usize, r: usize) -> f64 {
    r as f64 / (n - r) as f64
}

/// A₁ = diag(signs)/√n.
pub fn first_measurement(signs: &[f64]) -> DenseMatrix {
    let n = signs.len();
    DenseMatrix::from_diag(&signs.iter().map(|s| s / (n as f64).sqrt()).collect::<Vec<_>>())
}

/// A₂, …, A_{n²}: the completion of A₁ to an orthonormal basis of n×n
/// matrices, by Gram–Schmidt over the matrix units in column-stacked order.
pub fn completed_basis(a1: &DenseMatrix) -> Vec<DenseMatrix> {
    let n = a1.rows();
    complete_orthonormal(&[vec_cols(a1)], n * n)
        .into_iter()
        .map(|v| unvec(&v, n, n).expect("basis vectors have length n²"))
        .collect()
}

/// The quadratic form of Ā = √(n/(n−r)) · (⟨A₂,·⟩, …, ⟨A_{n²},·⟩).
pub fn tight_operator(n: usize, r: usize, signs: &[f64]) -> Result<QuadraticForm> {
    check_params(n, r)?;
    if signs.len() != n {
        return Err(Error::Dimension(format!("expected {n} signs, got {}", signs.len())));
    }
    if signs.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::Range("signs must be ±1".into()));
    }
    let a1 = first_measurement(signs);
    QuadraticForm::measurements(n, completed_basis(&a1), n as f64 / (n - r) as f64)
}

/// Dense form n/(n−r) · (I − vec(A₁)vec(A₁)ᵀ) of the tight operator.
pub fn tight_operator_dense(n: usize, r: usize, signs: &[f64]) -> Result<QuadraticForm> {
    check_params(n, r)?;
    if signs.len() != n {
        return Err(Error::Dimension(format!("expected {n} signs, got {}", signs.len())));
    }
    let a = vec_cols(&first_measurement(signs));
    let s = n as f64 / (n - r) as f64;
    let m = DenseMatrix::from_fn(n * n, n * n, |i, j| {
        s * (if i == j { 1.0 } else { 0.0 } - a[i] * a[j])
    });
    QuadraticForm::dense(m)
}

/// Signs (1, 1, −1, −1, 1, …, 1) of the second operator in the gap pair.
pub fn gap_signs(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i == 2 || i == 3 { -1.0 } else { 1.0 }).collect()
}

#[derive(Debug, Clone)]
pub struct GapPair {
    pub q: QuadraticForm,
    pub q_prime: QuadraticForm,
    pub k: DenseMatrix,
    pub l: DenseMatrix,
    /// |[Q − Q′](K, L)| / (‖K‖‖L‖)
    pub gap: f64,
}

pub fn bdp_gap_pair(n: usize, r: usize) -> Result<GapPair> {
    check_params(n, r)?;
    let q = tight_operator_dense(n, r, &vec![1.0; n])?;
    let q_prime = tight_operator_dense(n, r, &gap_signs(n))?;
    let k = DenseMatrix::from_fn(n, n, |i, j| if i == j && i < 2 { 1.0 } else { 0.0 });
    let l = DenseMatrix::from_fn(n, n, |i, j| if i == j && (i == 2 || i == 3) { 1.0 } else { 0.0 });
    let gap = (q.eval(&k, &l) - q_prime.eval(&k, &l)).abs() / (k.frobenius_norm() * l.frobenius_norm());
    Ok(GapPair {
        q,
        q_prime,
        k,
        l,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_examples() {
        let p = bdp_gap_pair(4, 1).unwrap();
        assert!((p.gap - 4.0 / 3.0).abs() < 1e-12);
        let p = bdp_gap_pair(6, 2).unwrap();
        assert!((p.gap - 1.0).abs() < 1e-12);
        assert!(bdp_gap_pair(4, 2).is_err());
        assert!(bdp_gap_pair(3, 1).is_err());
    }

    #[test]
    fn annihilates_first_measurement() {
        let signs = [1.0, -1.0, 1.0, 1.0];
        let q = tight_operator(4, 1, &signs).unwrap();
        let a1 = first_measurement(&signs);
        assert!(q.quad(&a1).abs() < 1e-12);
        assert!((tight_delta(4, 1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dense_and_measurement_forms_agree() {
        let signs = gap_signs(5);
        let a = tight_operator(5, 2, &signs).unwrap().to_dense();
        let b = tight_operator_dense(5, 2, &signs).unwrap().to_dense();
        assert!(a.sub(&b).max_abs() < 1e-12);
    }
}
