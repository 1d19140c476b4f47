//! Closed-form analysis of the rank-1 case and the explicit feasible points
//! of the dual of the η relaxation.

use std::f64::consts::SQRT_2;

use super::instance::{build_instance, Instance, DEGENERATE_TOL};
use crate::error::{Error, Result};
use crate::matrix::{complete_orthonormal, dot, kron_vec, min_eigenvalue, norm, psd_split, DenseMatrix};

/// Largest ε admitted by the local guarantee, 2(√2 − 1).
pub const EPSILON_MAX: f64 = 2.0 * (SQRT_2 - 1.0);

/// Decomposition z = c₁x + c₂w of a rank-1 pair.
#[derive(Debug, Clone)]
pub struct Rank1Geometry {
    pub alpha: f64,
    pub beta: f64,
    /// unit vector orthogonal to x
    pub w: Vec<f64>,
    /// ỹ rescaled so that ‖𝐗ŷ‖ = 1 (zero when x = 0)
    pub yhat: Vec<f64>,
    /// (1 − c₁²)/2 · x − c₁c₂ · w
    pub ytilde: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub e_norm: f64,
    pub x_norm: f64,
}

/// ‖x ỹᵀ + ỹ xᵀ‖_F
fn sym_outer_norm(x: &[f64], y: &[f64]) -> f64 {
    let xx = dot(x, x);
    let yy = dot(y, y);
    let xy = dot(x, y);
    (2.0 * xx * yy + 2.0 * xy * xy).max(0.0).sqrt()
}

pub fn rank1_geometry(x: &[f64], z: &[f64]) -> Result<Rank1Geometry> {
    let n = x.len();
    if z.len() != n {
        return Err(Error::Dimension(format!("x has length {n}, z has length {}", z.len())));
    }
    if n < 2 {
        return Err(Error::Dimension("rank-1 geometry needs n ≥ 2".into()));
    }
    let xm = DenseMatrix::column(x);
    let zm = DenseMatrix::column(z);
    let inst = build_instance(&xm, &zm, 0.0)?;
    inst.require_nondegenerate()?;
    let e_norm = inst.e_norm;
    let x_norm = norm(x);
    let z_norm = norm(z);
    if x_norm == 0.0 {
        return Ok(Rank1Geometry {
            alpha: z_norm * z_norm / e_norm,
            beta: 0.0,
            w: z.iter().map(|v| v / z_norm).collect(),
            yhat: vec![0.0; n],
            ytilde: vec![0.0; n],
            c1: 0.0,
            c2: z_norm,
            e_norm,
            x_norm,
        });
    }
    let c1 = dot(x, z) / (x_norm * x_norm);
    let resid: Vec<f64> = z.iter().zip(x).map(|(zi, xi)| zi - c1 * xi).collect();
    let c2 = norm(&resid);
    let w = if c2 > DEGENERATE_TOL * z_norm.max(x_norm) {
        resid.iter().map(|v| v / c2).collect()
    } else {
        let xhat: Vec<f64> = x.iter().map(|v| v / x_norm).collect();
        complete_orthonormal(&[xhat], n).swap_remove(0)
    };
    let ytilde: Vec<f64> = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| 0.5 * (1.0 - c1 * c1) * xi - c1 * c2 * wi)
        .collect();
    let xy = sym_outer_norm(x, &ytilde);
    let yhat = ytilde.iter().map(|v| v / xy).collect();
    Ok(Rank1Geometry {
        alpha: (c2 * c2 / e_norm).min(1.0),
        beta: x_norm * x_norm / e_norm,
        w,
        yhat,
        ytilde,
        c1,
        c2,
        e_norm,
        x_norm,
    })
}

/// ψ(γ) = γα + √(1−γ²)√(1−α²)
pub fn psi(gamma: f64, alpha: f64) -> f64 {
    gamma * alpha + (1.0 - gamma * gamma).max(0.0).sqrt() * (1.0 - alpha * alpha).max(0.0).sqrt()
}

/// Ψ(γ) = (2βγ + 1 − ψ(γ)) / (1 + ψ(γ))
#[allow(non_snake_case)]
pub fn Psi(gamma: f64, alpha: f64, beta: f64) -> f64 {
    let p = psi(gamma, alpha);
    (2.0 * beta * gamma + 1.0 - p) / (1.0 + p)
}

/// η₀ as a function of (α, β).
pub fn eta0_from(alpha: f64, beta: f64) -> f64 {
    let c = (1.0 - alpha * alpha).max(0.0).sqrt();
    if beta >= alpha / (1.0 + c) {
        (1.0 - c) / (1.0 + c)
    } else {
        beta * (beta - alpha) / (beta * alpha - 1.0)
    }
}

pub fn eta0(x: &[f64], z: &[f64]) -> Result<f64> {
    let g = rank1_geometry(x, z)?;
    if g.x_norm == 0.0 {
        return Ok(0.0);
    }
    Ok(eta0_from(g.alpha, g.beta))
}

/// Interior stationary point of Ψ on (0, α), if any.
pub fn psi_stationary_point(alpha: f64, beta: f64) -> Option<f64> {
    let c = (1.0 - alpha * alpha).max(0.0).sqrt();
    let denom = 1.0 - beta * alpha;
    if denom.abs() < 1e-300 {
        return None;
    }
    // with γ = sin φ, α = sin φ₀ and s = tan((φ − φ₀)/2), Ψ is a ratio of
    // quadratics in s whose critical point is s* below
    let s = -beta * c / denom;
    let lo = -alpha / (1.0 + c);
    if s > lo && s < 0.0 {
        let phi0 = alpha.asin();
        Some((2.0 * s.atan() + phi0).sin().clamp(0.0, alpha))
    } else {
        None
    }
}

/// max(0, (1 − t)/(1 + t)) with t = η₀ + 2(1+√2)κ.
pub fn delta_lower_bound_rank1(x: &[f64], z: &[f64], kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::Range(format!("kappa must be nonnegative, got {kappa}")));
    }
    let t = eta0(x, z)? + 2.0 * (1.0 + SQRT_2) * kappa;
    Ok(((1.0 - t) / (1.0 + t)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// (2 − 6(1+√2)κ)/(4 + 6(1+√2)κ), clamped at 0
    pub global_delta: f64,
    /// √(1 − (3+2√2)/4 · ε²)
    pub local_delta: f64,
    pub epsilon_max: f64,
}

pub fn global_threshold(kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::Range(format!("kappa must be nonnegative, got {kappa}")));
    }
    let c = 6.0 * (1.0 + SQRT_2) * kappa;
    Ok(((2.0 - c) / (4.0 + c)).max(0.0))
}

pub fn local_threshold(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= EPSILON_MAX * (1.0 + 1e-15)) {
        return Err(Error::Range(format!(
            "epsilon must lie in (0, 2(√2−1)] ≈ (0, {EPSILON_MAX:.6}] for the local guarantee, got {epsilon}"
        )));
    }
    Ok((1.0 - (3.0 + 2.0 * SQRT_2) / 4.0 * epsilon * epsilon).max(0.0).sqrt())
}

pub fn thresholds(kappa: f64, epsilon: f64) -> Result<Thresholds> {
    Ok(Thresholds {
        global_delta: global_threshold(kappa)?,
        local_delta: local_threshold(epsilon)?,
        epsilon_max: EPSILON_MAX,
    })
}

/// Which dual program a certificate is feasible for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    /// dual of the η relaxation with the second-order constraint (r = 1)
    Full,
    /// dual of the first-order-only relaxation
    FirstOrder,
}

/// A feasible dual point; its objective bounds η (or η_f) from above.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub kind: DualKind,
    pub u1: DenseMatrix,
    pub u2: DenseMatrix,
    pub v: DenseMatrix,
    pub g: DenseMatrix,
    pub lambda: f64,
    pub y: Vec<f64>,
    pub objective: f64,
    /// the dual multiplier γ used to build the point, when applicable
    pub gamma_dual: Option<f64>,
}

/// Constraint residuals of a certificate, recomputed from scratch.
#[derive(Debug, Clone)]
pub struct DualCheck {
    pub trace_residual: f64,
    /// largest entry of (𝐗y − v)𝐞ᵀ + 𝐞(𝐗y − v)ᵀ − (U₁ − U₂)
    pub equality_residual: f64,
    pub min_eig_u1: f64,
    pub min_eig_u2: f64,
    pub min_eig_v: f64,
    pub min_eig_schur: f64,
    pub objective: f64,
}

impl DualCheck {
    pub fn feasible(&self, tol: f64) -> bool {
        self.trace_residual <= tol
            && self.equality_residual <= tol
            && self.min_eig_u1 >= -tol
            && self.min_eig_u2 >= -tol
            && self.min_eig_v >= -tol
            && self.min_eig_schur >= -tol
    }
}

pub fn check_dual(inst: &Instance, cert: &DualCertificate) -> Result<DualCheck> {
    let big = inst.e.len();
    let mut r = inst.xop.matvec(&cert.y);
    if cert.kind == DualKind::Full {
        if cert.v.rows() * cert.v.cols() != big {
            return Err(Error::Dimension("V must be n×n for the rank-1 dual".into()));
        }
        for (ri, vi) in r.iter_mut().zip(crate::matrix::vec_cols(&cert.v)) {
            *ri -= vi;
        }
    }
    let lhs = DenseMatrix::outer(&r, &inst.e).add(&DenseMatrix::outer(&inst.e, &r));
    let equality_residual = lhs.sub(&cert.u1.sub(&cert.u2)).max_abs();
    let (min_eig_v, min_eig_schur, objective) = match cert.kind {
        DualKind::FirstOrder => (0.0, 0.0, cert.u2.trace()),
        DualKind::Full => {
            let m = cert.g.rows();
            let mut schur = DenseMatrix::zeros(m + 1, m + 1);
            for i in 0..m {
                for j in 0..m {
                    schur[(i, j)] = cert.g[(i, j)];
                }
                schur[(i, m)] = -cert.y[i];
                schur[(m, i)] = -cert.y[i];
            }
            schur[(m, m)] = cert.lambda;
            let xtx = inst.xop.tmatmul(&inst.xop);
            let cost = xtx.add(&DenseMatrix::scaled_identity(xtx.rows(), inst.b));
            let obj = cert.u2.trace() + cost.inner(&cert.v) + inst.a * inst.a * cert.lambda + cert.g.trace();
            (min_eigenvalue(&cert.v), min_eigenvalue(&schur), obj)
        }
    };
    Ok(DualCheck {
        trace_residual: (cert.u1.trace() - 1.0).abs(),
        equality_residual,
        min_eig_u1: min_eigenvalue(&cert.u1),
        min_eig_u2: min_eigenvalue(&cert.u2),
        min_eig_v,
        min_eig_schur,
        objective,
    })
}

/// Objective of the rank-1 certificate at γ without building matrices:
/// (1 − ψ + 2(β+κ)γ + 2a‖y‖)/(1 + ψ).
pub fn certificate_objective_rank1(geom: &Rank1Geometry, inst: &Instance, gamma: f64) -> f64 {
    let p = psi(gamma, geom.alpha);
    let ynorm = (1.0 - gamma * gamma).max(0.0).sqrt() * norm(&geom.yhat) / geom.e_norm;
    (1.0 - p + 2.0 * (geom.beta + inst.kappa) * gamma + 2.0 * inst.a * ynorm) / (1.0 + p)
}

fn rank1_instance(x: &[f64], z: &[f64], kappa: f64) -> Result<Instance> {
    let inst = build_instance(&DenseMatrix::column(x), &DenseMatrix::column(z), kappa)?;
    inst.require_nondegenerate()?;
    Ok(inst)
}

/// λ used when a = 0: the Schur multiplier then only needs G = yyᵀ/λ, whose
/// trace is made negligible.
const FREE_MULTIPLIER_SCALE: f64 = 1e12;

fn certificate_x_zero(inst: &Instance, z: &[f64]) -> DualCertificate {
    let en2 = inst.e_norm * inst.e_norm;
    let n = z.len();
    let u1 = DenseMatrix::outer(&inst.e, &inst.e).scale(1.0 / en2);
    let big = u1.rows();
    let v = DenseMatrix::outer(z, z).scale(0.5 / en2);
    let mut cert = DualCertificate {
        kind: DualKind::Full,
        u1,
        u2: DenseMatrix::zeros(big, big),
        v,
        g: DenseMatrix::zeros(n, n),
        lambda: 0.0,
        y: vec![0.0; n],
        objective: 0.0,
        gamma_dual: None,
    };
    cert.objective = inst.b * cert.v.trace();
    cert
}

/// The explicit dual point at multiplier γ ∈ [0, α].
pub fn dual_certificate_rank1(x: &[f64], z: &[f64], kappa: f64, gamma: f64) -> Result<DualCertificate> {
    let inst = rank1_instance(x, z, kappa)?;
    let geom = rank1_geometry(x, z)?;
    build_rank1(&inst, &geom, z, gamma)
}

fn build_rank1(inst: &Instance, geom: &Rank1Geometry, z: &[f64], gamma: f64) -> Result<DualCertificate> {
    if geom.x_norm == 0.0 {
        return Ok(certificate_x_zero(inst, z));
    }
    if !(gamma >= 0.0 && gamma <= geom.alpha * (1.0 + 1e-12)) {
        return Err(Error::Range(format!(
            "gamma must lie in [0, alpha] = [0, {}], got {gamma}",
            geom.alpha
        )));
    }
    let gamma = gamma.min(geom.alpha);
    let en = geom.e_norm;
    let sy = (1.0 - gamma * gamma).max(0.0).sqrt() / en;
    let y: Vec<f64> = geom.yhat.iter().map(|v| sy * v).collect();
    let ww = kron_vec(&geom.w, &geom.w);
    let mut d = inst.xop.matvec(&y);
    for (di, wi) in d.iter_mut().zip(&ww) {
        *di -= gamma / en * wi;
    }
    let m = DenseMatrix::outer(&d, &inst.e).add(&DenseMatrix::outer(&inst.e, &d));
    let (plus, minus) = psd_split(&m.symmetrize())?;
    let t = plus.trace();
    let ystar: Vec<f64> = y.iter().map(|v| v / t).collect();
    let ys_norm = norm(&ystar);
    let n = y.len();
    let (lambda, g) = if ys_norm == 0.0 {
        (0.0, DenseMatrix::zeros(n, n))
    } else {
        let lambda = if inst.a > 0.0 {
            ys_norm / inst.a
        } else {
            ys_norm * ys_norm * FREE_MULTIPLIER_SCALE
        };
        (lambda, DenseMatrix::outer(&ystar, &ystar).scale(1.0 / lambda))
    };
    let v = DenseMatrix::outer(&geom.w, &geom.w).scale(gamma / (en * t));
    let xtx = inst.xop.tmatmul(&inst.xop);
    let cost = xtx.add(&DenseMatrix::scaled_identity(n, inst.b));
    let u2 = minus.scale(1.0 / t);
    let objective = u2.trace() + cost.inner(&v) + inst.a * inst.a * lambda + g.trace();
    Ok(DualCertificate {
        kind: DualKind::Full,
        u1: plus.scale(1.0 / t),
        u2,
        v,
        g,
        lambda,
        y: ystar,
        objective,
        gamma_dual: Some(gamma),
    })
}

/// Number of uniform grid points on [0, α] searched for the best γ.
pub const GAMMA_GRID: usize = 100;

/// The rank-1 certificate minimized over a γ-grid plus the stationary point
/// of Ψ.
pub fn best_dual_certificate_rank1(x: &[f64], z: &[f64], kappa: f64) -> Result<DualCertificate> {
    let inst = rank1_instance(x, z, kappa)?;
    let geom = rank1_geometry(x, z)?;
    if geom.x_norm == 0.0 {
        return Ok(certificate_x_zero(&inst, z));
    }
    let mut candidates: Vec<f64> = (0..GAMMA_GRID)
        .map(|i| geom.alpha * i as f64 / (GAMMA_GRID - 1) as f64)
        .collect();
    if let Some(g) = psi_stationary_point(geom.alpha, geom.beta) {
        candidates.push(g);
    }
    let mut best = (f64::INFINITY, 0.0);
    for g in candidates {
        let v = certificate_objective_rank1(&geom, &inst, g);
        if v < best.0 {
            best = (v, g);
        }
    }
    build_rank1(&inst, &geom, z, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_examples() {
        let g = rank1_geometry(&[1.0, 0.0], &[0.0, 2.0]).unwrap();
        let s17 = 17f64.sqrt();
        assert!((g.alpha - 4.0 / s17).abs() < 1e-14);
        assert!((g.beta - 1.0 / s17).abs() < 1e-14);

        let g = rank1_geometry(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((g.alpha, g.beta), (1.0, 0.0));

        let g = rank1_geometry(&[1.0, 0.0, 0.0], &[3.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.c2, 0.0);
        assert_eq!(g.alpha, 0.0);
        assert!(dot(&g.w, &[1.0, 0.0, 0.0]).abs() < 1e-15);
        assert!((norm(&g.w) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eta0_examples() {
        assert!((eta0(&[1.0, 0.0], &[0.0, 2.0]).unwrap() - 3.0 / 13.0).abs() < 1e-14);
        assert_eq!(eta0(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.0);
        let z = [0.0, 2f64.sqrt()];
        assert!((eta0(&[1.0, 0.0], &z).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(eta0(&[1.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let b = delta_lower_bound_rank1(&[1.0, 0.0], &[0.0, 2.0], 0.0).unwrap();
        assert!((b - 0.625).abs() < 1e-14);
        let z = [0.0, 2f64.sqrt()];
        assert!((delta_lower_bound_rank1(&[1.0, 0.0], &z, 0.0).unwrap() - 0.5).abs() < 1e-14);
        let k = 1.0 / (3.0 * (1.0 + SQRT_2));
        assert!(delta_lower_bound_rank1(&[1.0, 0.0], &z, k).unwrap().abs() < 1e-14);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(global_threshold(0.0).unwrap(), 0.5);
        let c = 0.3 * (1.0 + SQRT_2);
        assert!((global_threshold(0.05).unwrap() - (2.0 - c) / (4.0 + c)).abs() < 1e-15);
        assert!((global_threshold(0.05).unwrap() - 0.2700).abs() < 1e-4);
        assert_eq!(global_threshold(0.2).unwrap(), 0.0);
        assert!(local_threshold(EPSILON_MAX).unwrap() < 1e-7);
        assert!(local_threshold(0.0).is_err());
        assert!(local_threshold(0.9).is_err());
        let t = thresholds(0.0, 0.5).unwrap();
        assert!((t.local_delta - 0.7973).abs() < 1e-4);
    }

    #[test]
    fn certificate_at_best_gamma_matches_eta0() {
        // one pair minimized at γ = 0, one at the interior stationary point
        for (x, z) in [([1.0, 0.2, -0.3], [0.4, 1.1, 0.5]), ([0.3, 0.0, 0.1], [0.2, 1.5, -0.4])] {
            let g = rank1_geometry(&x, &z).unwrap();
            let e0 = eta0_from(g.alpha, g.beta);
            let mut cands = vec![0.0, g.alpha];
            cands.extend(psi_stationary_point(g.alpha, g.beta));
            let best = cands
                .into_iter()
                .min_by(|a, b| Psi(*a, g.alpha, g.beta).total_cmp(&Psi(*b, g.alpha, g.beta)))
                .unwrap();
            let cert = dual_certificate_rank1(&x, &z, 0.0, best).unwrap();
            assert!((cert.objective - e0).abs() < 1e-8, "{} vs {e0}", cert.objective);
            let inst = build_instance(&DenseMatrix::column(&x), &DenseMatrix::column(&z), 0.0).unwrap();
            let chk = check_dual(&inst, &cert).unwrap();
            assert!(chk.feasible(1e-9), "{chk:?}");
            assert!((chk.objective - cert.objective).abs() < 1e-12);
        }
        let g = rank1_geometry(&[0.3, 0.0, 0.1], &[0.2, 1.5, -0.4]).unwrap();
        assert!(psi_stationary_point(g.alpha, g.beta).is_some());
    }

    #[test]
    fn x_zero_certificate_has_objective_kappa() {
        let z = [0.5, -1.0, 2.0];
        let cert = dual_certificate_rank1(&[0.0; 3], &z, 0.07, 0.0).unwrap();
        assert!((cert.objective - 0.07).abs() < 1e-12);
        let inst = build_instance(&DenseMatrix::zeros(3, 1), &DenseMatrix::column(&z), 0.07).unwrap();
        let chk = check_dual(&inst, &cert).unwrap();
        assert!(chk.feasible(1e-9), "{chk:?}");
        assert!((chk.objective - 0.07).abs() < 1e-12);
    }

    #[test]
    fn gamma_out_of_range() {
        assert!(matches!(
            dual_certificate_rank1(&[1.0, 0.0], &[0.0, 2.0], 0.0, 0.99),
            Err(Error::Range(_))
        ));
    }
}
