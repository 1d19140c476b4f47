//! Factorizations on small dense matrices: Cholesky, cyclic Jacobi
//! eigendecomposition, one-sided Jacobi SVD and PSD splitting.

use super::dense::{dot, norm, DenseMatrix};
use crate::error::{Error, Result};

/// Symmetric inputs to [`eig_sym`] must be symmetric to this absolute level,
/// scaled by the largest entry when that exceeds one.
pub const SYMMETRY_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted decreasing with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k)
    }

    /// V diag(f(λ)) Vᵀ
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let vi = w * v[i];
                if vi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * v[j];
                }
            }
        }
        out
    }
}

/// Thin singular value decomposition A = U diag(σ) Vᵀ with σ sorted
/// decreasing. U is m×k, V is n×k, k = min(m, n).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Cyclic Jacobi rotations on a symmetric matrix held in a flat row-major
/// buffer. When `vectors` is given the rotations are accumulated into it.
fn jacobi_in_place(a: &mut [f64], n: usize, mut vectors: Option<&mut [f64]>) {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p, q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // rows p, q
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = vectors.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi. Values sorted decreasing.
pub fn eig_sym(a: &DenseMatrix) -> Result<EigenDecomposition> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut work = a.symmetrize().into_vec();
    let mut v = DenseMatrix::identity(n).into_vec();
    jacobi_in_place(&mut work, n, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[j * n + j].total_cmp(&work[i * n + i]));
    let values = order.iter().map(|&i| work[i * n + i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, sorted decreasing. The input is symmetrized without a
/// contract check; callers pass matrices symmetric by construction.
pub fn eigenvalues_sym(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut work = a.symmetrize().into_vec();
    jacobi_in_place(&mut work, n, None);
    let mut vals: Vec<f64> = (0..n).map(|i| work[i * n + i]).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

pub fn min_eigenvalue(a: &DenseMatrix) -> f64 {
    eigenvalues_sym(a).last().copied().unwrap_or(0.0)
}

/// Lower-triangular Cholesky factor L with A = L Lᵀ. Returns `None` when a
/// pivot is not strictly positive.
pub fn cholesky(a: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = a[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Solves L x = b in place (L lower triangular).
pub fn forward_substitute(l: &DenseMatrix, b: &mut [f64]) {
    let n = l.rows();
    for i in 0..n {
        let s = b[i] - dot(&l.row(i)[..i], &b[..i]);
        b[i] = s / l[(i, i)];
    }
}

/// Solves Lᵀ x = b in place (L lower triangular).
pub fn backward_substitute_transposed(l: &DenseMatrix, b: &mut [f64]) {
    let n = l.rows();
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves (L Lᵀ) x = b.
pub fn cholesky_solve(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    forward_substitute(l, &mut x);
    backward_substitute_transposed(l, &mut x);
    x
}

/// Inverse of L⁻¹ for a lower-triangular factor.
pub fn lower_inverse(l: &DenseMatrix) -> DenseMatrix {
    let n = l.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        forward_substitute(l, &mut e);
        inv.set_col(j, &e);
    }
    inv
}

/// (L Lᵀ)⁻¹ = L⁻ᵀ L⁻¹.
pub fn spd_inverse_from_factor(l: &DenseMatrix) -> DenseMatrix {
    let linv = lower_inverse(l);
    linv.tmatmul(&linv)
}

/// Thin SVD via one-sided (Hestenes) Jacobi rotations.
pub fn svd(a: &DenseMatrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    // columns of A and V
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<(f64, usize)> = cols.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    sig.sort_by(|x, y| y.0.total_cmp(&x.0));
    let scale = sig.first().map_or(0.0, |s| s.0);
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &(s, j)) in sig.iter().enumerate() {
        if s > 1e-14 * scale.max(f64::MIN_POSITIVE) {
            ucols.push(cols[j].iter().map(|x| x / s).collect());
        } else {
            ucols.push(vec![0.0; m]);
            missing.push(k);
        }
    }
    if !missing.is_empty() {
        let known: Vec<Vec<f64>> = ucols
            .iter()
            .enumerate()
            .filter(|(k, _)| !missing.contains(k))
            .map(|(_, c)| c.clone())
            .collect();
        let extra = complete_orthonormal(&known, m);
        for (slot, v) in missing.iter().zip(extra) {
            ucols[*slot] = v;
        }
    }
    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(s, j)) in sig.iter().enumerate() {
        u.set_col(k, &ucols[k]);
        v.set_col(k, &vcols[j]);
        sigma.push(s);
    }
    Svd { u, sigma, v }
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Numerical rank: singular values above `rel_tol · σ₁`.
pub fn rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let s = svd(a).sigma;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Extends an orthonormal family to a basis of ℝ^dim by Gram–Schmidt over
/// the standard unit vectors e₀, e₁, … in order. Returns only the new vectors.
pub fn complete_orthonormal(known: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = known.to_vec();
    let mut added = Vec::new();
    for k in 0..dim {
        if basis.len() >= dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            for x in v.iter_mut() {
                *x /= nv;
            }
            basis.push(v.clone());
            added.push(v);
        }
    }
    added
}

/// Splits a symmetric matrix into M = M₊ − M₋ with M₊, M₋ ⪰ 0 and
/// ⟨M₊, M₋⟩ = 0, by clamping eigenvalues at zero.
pub fn psd_split(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let eig = eig_sym(m)?;
    let plus = eig.reconstruct_with(|l| if l > 0.0 { l } else { 0.0 });
    let minus = eig.reconstruct_with(|l| if l < 0.0 { -l } else { 0.0 });
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        // small LCG keeps these unit tests free of RNG dependencies
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        DenseMatrix::from_fn(rows, cols, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn eig_sym_diagonal() {
        let e = eig_sym(&DenseMatrix::from_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
    }

    #[test]
    fn eig_sym_rejects_nonsymmetric() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_sym(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn eig_sym_reconstructs_random_symmetric() {
        for seed in 0..5 {
            let b = random_matrix(4, 4, seed);
            let a = b.add(&b.transpose());
            let e = eig_sym(&a).unwrap();
            let back = e.reconstruct_with(|l| l);
            assert!(back.sub(&a).frobenius_norm() <= 1e-10);
            for k in 0..4 {
                let v = e.vector(k);
                let av = a.matvec(&v);
                let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - e.values[k] * y).powi(2)).sum();
                assert!(res.sqrt() <= 1e-10 * a.frobenius_norm());
            }
            let gram = e.vectors.tmatmul(&e.vectors);
            assert!(gram.sub(&DenseMatrix::identity(4)).max_abs() <= 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_absorbs_sign() {
        let s = svd(&DenseMatrix::from_diag(&[-2.0]));
        assert_eq!(s.sigma, vec![2.0]);
        let back = s.u.scale(s.sigma[0]).matmul(&s.v.transpose());
        assert!((back[(0, 0)] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn svd_reconstructs_rectangular_and_rank_deficient() {
        for (r, c) in [(5, 3), (3, 5), (4, 4)] {
            let a = random_matrix(r, c, 7);
            let s = svd(&a);
            let mut us = s.u.clone();
            for k in 0..s.sigma.len() {
                for i in 0..us.rows() {
                    us[(i, k)] *= s.sigma[k];
                }
            }
            assert!(us.matmul(&s.v.transpose()).sub(&a).frobenius_norm() <= 1e-12);
            assert!(s.sigma.iter().all(|&x| x >= 0.0));
        }
        let u = DenseMatrix::column(&[1.0, 2.0, 0.0]);
        let a = u.matmul(&u.transpose());
        let s = svd(&a);
        assert!(s.sigma[1] < 1e-14 && s.sigma[2] < 1e-14);
        let gram = s.u.tmatmul(&s.u);
        assert!(gram.sub(&DenseMatrix::identity(3)).max_abs() < 1e-12);
        assert_eq!(rank(&a, 1e-10), 1);
    }

    #[test]
    fn cholesky_solves() {
        let b = random_matrix(5, 5, 3);
        let a = b.tmatmul(&b).add(&DenseMatrix::identity(5));
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let ax = a.matvec(&x);
        for (i, v) in ax.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-10);
        }
        let inv = spd_inverse_from_factor(&l);
        assert!(inv.matmul(&a).sub(&DenseMatrix::identity(5)).max_abs() < 1e-10);
        assert!(cholesky(&DenseMatrix::from_diag(&[1.0, -1.0])).is_none());
    }

    #[test]
    fn psd_split_examples() {
        let (p, m) = psd_split(&DenseMatrix::from_diag(&[1.0, -2.0])).unwrap();
        assert!(p.sub(&DenseMatrix::from_diag(&[1.0, 0.0])).max_abs() < 1e-15);
        assert!(m.sub(&DenseMatrix::from_diag(&[0.0, 2.0])).max_abs() < 1e-15);
        let b = random_matrix(3, 3, 11);
        let psd = b.tmatmul(&b);
        let (p, m) = psd_split(&psd).unwrap();
        assert!(p.sub(&psd).max_abs() < 1e-12);
        assert!(m.max_abs() < 1e-12);
    }

    #[test]
    fn orthonormal_completion() {
        let s = 0.5f64.sqrt();
        let extra = complete_orthonormal(&[vec![s, s, 0.0]], 3);
        assert_eq!(extra.len(), 2);
        let all = [vec![s, s, 0.0], extra[0].clone(), extra[1].clone()];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&all[i], &all[j]) - want).abs() < 1e-14);
            }
        }
    }
}
