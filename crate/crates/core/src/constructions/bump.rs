//! The smooth bump H(t) = exp(−t^(−γ)) and the extension
//! f(V) = ½[Q′](V,V) + ½H(‖V‖²)[Δ](V,V), Δ = Q − Q′, whose Hessian equals Q′
//! at the origin and is within μ of Q far away from it.
//!
//! The calibrated base point sits at ‖V‖² = exp(thousands), far beyond f64,
//! so base points are stored as a unit direction plus ln ‖V‖².

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

use super::form::QuadraticForm;

/// (H, H′, H″) at t. All three vanish for t ≤ 0.
pub fn bump(t: f64, gamma_exp: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (h, th1, t2h2) = bump_scaled(t.ln(), gamma_exp);
    (h, th1 / t, t2h2 / (t * t))
}

/// (H, tH′, t²H″) as functions of ln t, finite for any ln t.
pub fn bump_scaled(ln_t: f64, gamma_exp: f64) -> (f64, f64, f64) {
    if ln_t == f64::NEG_INFINITY {
        return (0.0, 0.0, 0.0);
    }
    let u = (-gamma_exp * ln_t).exp();
    if !u.is_finite() {
        return (0.0, 0.0, 0.0);
    }
    let h = (-u).exp();
    let g = gamma_exp;
    (h, g * u * h, h * (g * g * u * u - g * (g + 1.0) * u))
}

/// V = exp(ln_norm_sq / 2) · direction with ‖direction‖_F = 1, or V = 0 when
/// `ln_norm_sq` is −∞.
#[derive(Debug, Clone)]
pub struct ScaledPoint {
    pub direction: DenseMatrix,
    pub ln_norm_sq: f64,
}

impl ScaledPoint {
    pub fn zero(n: usize) -> Self {
        Self {
            direction: DenseMatrix::zeros(n, n),
            ln_norm_sq: f64::NEG_INFINITY,
        }
    }

    pub fn new(direction: &DenseMatrix, ln_norm_sq: f64) -> Result<Self> {
        let nd = direction.frobenius_norm();
        if nd == 0.0 {
            return Err(Error::Range("direction must be nonzero".into()));
        }
        Ok(Self {
            direction: direction.scale(1.0 / nd),
            ln_norm_sq,
        })
    }

    pub fn from_matrix(v: &DenseMatrix) -> Self {
        let nv = v.frobenius_norm();
        if nv == 0.0 {
            return Self::zero(v.rows());
        }
        Self {
            direction: v.scale(1.0 / nv),
            ln_norm_sq: 2.0 * nv.ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_norm_sq == f64::NEG_INFINITY
    }

    /// The matrix itself; infinite entries when the norm overflows.
    pub fn to_matrix(&self) -> DenseMatrix {
        if self.is_zero() {
            return DenseMatrix::zeros(self.direction.rows(), self.direction.cols());
        }
        self.direction.scale((0.5 * self.ln_norm_sq).exp())
    }
}

#[derive(Debug, Clone)]
pub struct BumpExtension {
    pub q: QuadraticForm,
    pub q_prime: QuadraticForm,
    /// Q − Q′
    pub delta: QuadraticForm,
    pub gamma_exp: f64,
    /// |[Δ](K,L)| ≤ C‖K‖‖L‖
    pub c: f64,
    /// ln s for the calibrated point M = diag(s, 0, …, 0)
    pub ln_s: f64,
    pub mu: f64,
}

impl BumpExtension {
    pub fn n(&self) -> usize {
        self.q.n()
    }

    /// The calibrated base point M = diag(s, 0, …, 0).
    pub fn calibrated_point(&self) -> ScaledPoint {
        let n = self.n();
        let e11 = DenseMatrix::from_fn(n, n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 });
        ScaledPoint {
            direction: e11,
            ln_norm_sq: 2.0 * self.ln_s,
        }
    }

    /// f(V) for an ordinary matrix.
    pub fn value(&self, v: &DenseMatrix) -> f64 {
        let t = v.frobenius_norm().powi(2);
        let (h, _, _) = bump(t, self.gamma_exp);
        0.5 * self.q_prime.quad(v) + 0.5 * h * self.delta.quad(v)
    }

    /// 26γC/e ≤ μ
    pub fn derivative_condition(&self) -> bool {
        26.0 * self.gamma_exp * self.c / std::f64::consts::E <= self.mu
    }

    /// H(s²) ≥ 1 − μ/(2C)
    pub fn saturation_condition(&self) -> bool {
        if self.c == 0.0 {
            return true;
        }
        let (h, _, _) = bump_scaled(2.0 * self.ln_s, self.gamma_exp);
        h >= 1.0 - self.mu / (2.0 * self.c)
    }
}

/// Chooses γ and s for a pair (Q, Q′) so that the extension's Hessian stays
/// within μ of the convex combination of Q and Q′ everywhere and within μ of
/// Q at the calibrated point.
pub fn calibrate_extension(q: &QuadraticForm, q_prime: &QuadraticForm, mu: f64) -> Result<BumpExtension> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Range(format!("mu must be positive, got {mu}")));
    }
    let delta = QuadraticForm::combine(&[(1.0, q), (-1.0, q_prime)])?;
    let c = delta.operator_norm();
    if c == 0.0 {
        return Ok(BumpExtension {
            q: q.clone(),
            q_prime: q_prime.clone(),
            delta,
            gamma_exp: 0.5,
            c,
            ln_s: 0.0,
            mu,
        });
    }
    let gamma_exp = (mu * std::f64::consts::E / (26.0 * c) * (1.0 - 1e-12)).min(0.5);
    // H(t) ≥ 1 − μ/(2C)  ⇔  t^(−γ) ≤ u_max  ⇔  ln t ≥ −ln(u_max)/γ
    let u_max = -(1.0 - mu / (2.0 * c)).max(f64::MIN_POSITIVE).ln();
    let ln_t = (-u_max.ln() / gamma_exp).max(0.0) + 1.0;
    Ok(BumpExtension {
        q: q.clone(),
        q_prime: q_prime.clone(),
        delta,
        gamma_exp,
        c,
        ln_s: 0.5 * ln_t,
        mu,
    })
}

/// The Hessian ∇²f(V):
/// [Q′ + HΔ](K,L) + 2H″⟨V,K⟩⟨V,L⟩[Δ](V,V) + H′⟨K,L⟩[Δ](V,V)
/// + 2H′(⟨V,K⟩[Δ](V,L) + ⟨V,L⟩[Δ](V,K)).
pub fn extension_hessian(v: &ScaledPoint, ext: &BumpExtension) -> QuadraticForm {
    let n = ext.n();
    let n2 = n * n;
    let qp = ext.q_prime.to_dense();
    if v.is_zero() {
        return QuadraticForm::dense(qp).expect("Q′ is symmetric");
    }
    let d = ext.delta.to_dense();
    let (h, th1, t2h2) = bump_scaled(v.ln_norm_sq, ext.gamma_exp);
    // with V = √t·V̂ every term is expressed through tH′, t²H″ and V̂
    let vh = crate::matrix::vec_cols(&v.direction);
    let dv = d.matvec(&vh);
    let dvv = crate::matrix::dot(&vh, &dv);
    let mut m = qp.add(&d.scale(h));
    for i in 0..n2 {
        for j in 0..n2 {
            let mut add = 2.0 * t2h2 * vh[i] * vh[j] * dvv;
            if i == j {
                add += th1 * dvv;
            }
            add += 2.0 * th1 * (vh[i] * dv[j] + dv[i] * vh[j]);
            m[(i, j)] += add;
        }
    }
    QuadraticForm::dense(m.symmetrize()).expect("Hessian is symmetric")
}

/// ∇²f̃(V) = (1 − λ)Q′ + λ∇²f(V).
pub fn blend_hessian(v: &ScaledPoint, lambda: f64, ext: &BumpExtension) -> Result<QuadraticForm> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Range(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let hf = extension_hessian(v, ext);
    QuadraticForm::combine(&[(1.0 - lambda, &ext.q_prime), (lambda, &hf)])
}

/// Supremum of the blend weights λ with d < (2 − cλd)/(4 + cλd), where
/// d = 1/3 + μ and c = 24(1+√2).
pub fn blend_lambda_max(mu: f64) -> f64 {
    let d = 1.0 / 3.0 + mu;
    let c = 24.0 * (1.0 + std::f64::consts::SQRT_2);
    (2.0 - 4.0 * d) / (c * d * (1.0 + d))
}

/// Both sides of d < (2 − cλd)/(4 + cλd) for the n = 4 blend.
pub fn blend_condition(lambda: f64, mu: f64) -> (f64, f64, bool) {
    let d = 1.0 / 3.0 + mu;
    let c = 24.0 * (1.0 + std::f64::consts::SQRT_2) * lambda * d;
    let rhs = (2.0 - c) / (4.0 + c);
    (d, rhs, d < rhs)
}
