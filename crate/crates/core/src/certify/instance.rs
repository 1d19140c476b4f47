use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_sym, norm, vec_cols, x_operator, DenseMatrix};

/// Relative size below which ‖XXᵀ − ZZᵀ‖ counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// A candidate point X, ground truth Z and BDP constant κ together with the
/// derived quantities the certification programs are built from.
#[derive(Debug, Clone)]
pub struct Instance {
    pub x: DenseMatrix,
    pub z: DenseMatrix,
    pub kappa: f64,
    /// vec(XXᵀ − ZZᵀ)
    pub e: Vec<f64>,
    pub e_norm: f64,
    /// n²×nr matrix of U ↦ vec(XUᵀ + UXᵀ)
    pub xop: DenseMatrix,
    /// 2κ √λ₁(XXᵀ) ‖e‖
    pub a: f64,
    /// 2κ ‖e‖
    pub b: f64,
    pub degenerate: bool,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn r(&self) -> usize {
        self.x.cols()
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::Degenerate)
        } else {
            Ok(())
        }
    }
}

pub fn build_instance(x: &DenseMatrix, z: &DenseMatrix, kappa: f64) -> Result<Instance> {
    if x.shape() != z.shape() {
        return Err(Error::Dimension(format!(
            "X is {}x{} but Z is {}x{}",
            x.rows(),
            x.cols(),
            z.rows(),
            z.cols()
        )));
    }
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::Dimension("X and Z must be non-empty".into()));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Range(format!("kappa must be a finite nonnegative number, got {kappa}")));
    }
    if !x.is_finite() || !z.is_finite() {
        return Err(Error::Range("X and Z must have finite entries".into()));
    }
    let xx = x.matmul(&x.transpose());
    let zz = z.matmul(&z.transpose());
    let e = vec_cols(&xx.sub(&zz));
    let e_norm = norm(&e);
    let scale = xx.frobenius_norm().max(zz.frobenius_norm());
    let degenerate = e_norm <= DEGENERATE_TOL * scale || e_norm == 0.0;
    let lambda1 = eigenvalues_sym(&x.tmatmul(x))
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    Ok(Instance {
        xop: x_operator(x),
        a: 2.0 * kappa * lambda1.sqrt() * e_norm,
        b: 2.0 * kappa * e_norm,
        x: x.clone(),
        z: z.clone(),
        kappa,
        e,
        e_norm,
        degenerate,
    })
}
