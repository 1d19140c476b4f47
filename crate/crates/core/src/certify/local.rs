//! Rank-r local analysis: factor alignment, the first-order dual point and
//! the supporting inequalities.

use std::f64::consts::SQRT_2;

use super::instance::build_instance;
use super::rank1::{DualCertificate, DualKind};
use crate::constructions::QuadraticForm;
use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_sym, min_eigenvalue, norm, psd_split, rank, svd, vec_cols, DenseMatrix};

/// XR with R = UVᵀ from the SVD XᵀZ = UΣVᵀ, so that (XR)ᵀZ ⪰ 0.
pub fn align_factors(x: &DenseMatrix, z: &DenseMatrix) -> Result<DenseMatrix> {
    if x.shape() != z.shape() {
        return Err(Error::Dimension(format!(
            "X is {}x{} but Z is {}x{}",
            x.rows(),
            x.cols(),
            z.rows(),
            z.cols()
        )));
    }
    let s = svd(&x.tmatmul(z));
    let rot = s.u.matmul(&s.v.transpose());
    Ok(x.matmul(&rot))
}

/// Fails unless XᵀZ is symmetric PSD to `tol` relative to its size.
pub fn check_aligned(x: &DenseMatrix, z: &DenseMatrix, tol: f64) -> Result<()> {
    let xtz = x.tmatmul(z);
    let scale = xtz.max_abs().max(1.0);
    let asym = xtz.asymmetry();
    if asym > tol * scale {
        return Err(Error::Alignment(format!("XᵀZ has asymmetry {asym:e}")));
    }
    let lmin = min_eigenvalue(&xtz.symmetrize());
    if lmin < -tol * scale {
        return Err(Error::Alignment(format!("XᵀZ has eigenvalue {lmin:e}")));
    }
    Ok(())
}

/// Alignment tolerance used by the local operations.
pub const ALIGN_TOL: f64 = 1e-10;

/// The first-order dual point together with the angle θ between 𝐞 and 𝐗y.
#[derive(Debug, Clone)]
pub struct LocalCertificate {
    pub certificate: DualCertificate,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn dual_certificate_local(x: &DenseMatrix, z: &DenseMatrix) -> Result<LocalCertificate> {
    let inst = build_instance(x, z, 0.0)?;
    inst.require_nondegenerate()?;
    check_aligned(x, z, ALIGN_TOL)?;
    let xn2 = x.frobenius_norm().powi(2);
    if xn2 == 0.0 {
        return Err(Error::RankDeficient("X = 0 leaves 𝐗y = 0".into()));
    }
    let c1 = x.inner(z) / xn2;
    let resid = z.sub(&x.scale(c1));
    let c2 = resid.frobenius_norm();
    // c₁c₂W = c₁(Z − c₁X), so W itself is never needed
    let y_mat = x.scale(0.5 * (1.0 - c1 * c1)).sub(&resid.scale(c1));
    let y = vec_cols(&y_mat);
    let xy = inst.xop.matvec(&y);
    let xy_norm = norm(&xy);
    if xy_norm == 0.0 {
        return Err(Error::RankDeficient("𝐗y vanishes".into()));
    }
    let cos_theta = (crate::matrix::dot(&inst.e, &xy) / (inst.e_norm * xy_norm)).clamp(-1.0, 1.0);
    let m = DenseMatrix::outer(&xy, &inst.e).add(&DenseMatrix::outer(&inst.e, &xy));
    let (plus, minus) = psd_split(&m.symmetrize())?;
    let t = plus.trace();
    let u2 = minus.scale(1.0 / t);
    let nr = y.len();
    let certificate = DualCertificate {
        kind: DualKind::FirstOrder,
        u1: plus.scale(1.0 / t),
        objective: u2.trace(),
        u2,
        v: DenseMatrix::zeros(nr, nr),
        g: DenseMatrix::zeros(nr, nr),
        lambda: 0.0,
        y: y.iter().map(|v| v / t).collect(),
        gamma_dual: None,
    };
    Ok(LocalCertificate {
        certificate,
        cos_theta,
        sin_theta: (1.0 - cos_theta * cos_theta).max(0.0).sqrt(),
        c1,
        c2,
    })
}

/// (1 − cos θ)/(1 + cos θ)
pub fn angle_bound(cos_theta: f64) -> f64 {
    (1.0 - cos_theta) / (1.0 + cos_theta)
}

/// ‖XXᵀ − ZZᵀ‖_F / λ_r(ZZᵀ), the relative distance ε of X from the truth.
pub fn relative_error(x: &DenseMatrix, z: &DenseMatrix) -> Result<f64> {
    let inst = build_instance(x, z, 0.0)?;
    let lr = lambda_r(z);
    if lr <= 0.0 {
        return Err(Error::RankDeficient("λ_r(ZZᵀ) = 0".into()));
    }
    Ok(inst.e_norm / lr)
}

/// r-th largest eigenvalue of ZZᵀ (= smallest eigenvalue of ZᵀZ).
pub fn lambda_r(z: &DenseMatrix) -> f64 {
    eigenvalues_sym(&z.tmatmul(z)).last().copied().unwrap_or(0.0).max(0.0)
}

/// Both sides of λ_r(ZZᵀ)‖Z − X‖² ≤ ‖ZZᵀ − XXᵀ‖²/(2(√2 − 1)) for aligned
/// factors.
pub fn error_ratio_check(x: &DenseMatrix, z: &DenseMatrix) -> Result<(f64, f64)> {
    let inst = build_instance(x, z, 0.0)?;
    check_aligned(x, z, ALIGN_TOL)?;
    let lhs = lambda_r(z) * z.sub(x).frobenius_norm().powi(2);
    let rhs = inst.e_norm * inst.e_norm / (2.0 * (SQRT_2 - 1.0));
    Ok((lhs, rhs))
}

/// |[Q](K,L) − ⟨K,L⟩| / (‖K‖‖L‖) for K, L of rank at most `rank_budget`.
pub fn rop_gap(q: &QuadraticForm, k: &DenseMatrix, l: &DenseMatrix, rank_budget: usize) -> Result<f64> {
    let kn = k.frobenius_norm();
    let ln = l.frobenius_norm();
    if kn == 0.0 || ln == 0.0 {
        return Err(Error::Range("K and L must be nonzero".into()));
    }
    for (name, m) in [("K", k), ("L", l)] {
        let rk = rank(m, 1e-10);
        if rk > rank_budget {
            return Err(Error::Range(format!("{name} has rank {rk} > {rank_budget}")));
        }
    }
    Ok((q.eval(k, l) - k.inner(l)).abs() / (kn * ln))
}
