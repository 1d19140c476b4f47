//! Single-case property checks shared by the proptest suites and the
//! acceptance runner. Each returns Err with a description on violation.
//! Reference values are computed here independently of the library paths
//! they check wherever that is practical.

#![allow(dead_code)]

use std::f64::consts::SQRT_2;

use rankcert::certify::{error_ratio_check, eta0_from, Psi};
use rankcert::constructions::{completed_basis, first_measurement, BumpExtension};
use rankcert::matrix::{eigenvalues_sym, psd_split, vec_cols, x_operator, DenseMatrix};
use rankcert::onebit::{local_constants, loglik_hessian, sigma_prime};

pub type Check = Result<(), String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn mat_from(rows: usize, cols: usize, data: &[f64]) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |i, j| data[i * cols + j])
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// matrix identities

pub fn vec_adjoint(a: &DenseMatrix, b: &DenseMatrix) -> Check {
    let lhs = dotv(&vec_cols(a), &vec_cols(b));
    let mut rhs = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            rhs += a[(i, j)] * b[(i, j)];
        }
    }
    ensure((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), || format!("{lhs} vs {rhs}"))
}

pub fn x_operator_action(x: &DenseMatrix, u: &DenseMatrix) -> Check {
    let lhs = x_operator(x).matvec(&vec_cols(u));
    let n = x.rows();
    // vec(XUᵀ + UXᵀ) entry by entry, column-stacked
    let mut rhs = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..x.cols() {
                s += x[(i, k)] * u[(j, k)] + u[(i, k)] * x[(j, k)];
            }
            rhs[j * n + i] = s;
        }
    }
    let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    ensure(err <= 1e-12 * (1.0 + rhs.iter().map(|v| v.abs()).fold(0.0, f64::max)), || format!("error {err:e}"))
}

pub fn rank1_norm_identity(x: &[f64], u: &[f64]) -> Check {
    let xm = DenseMatrix::column(x);
    let v = x_operator(&xm).matvec(u);
    let lhs = dotv(&v, &v);
    let xx = dotv(x, x);
    let rhs = 2.0 * xx * dotv(u, u) + 2.0 * dotv(x, u).powi(2);
    ensure((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs), || format!("{lhs} vs {rhs}"))
}

/// uvᵀ + vuᵀ has eigenvalues ‖u‖‖v‖(cos θ ± 1) and zeros.
pub fn eigangle(u: &[f64], v: &[f64]) -> Check {
    let m = DenseMatrix::outer(u, v).add(&DenseMatrix::outer(v, u));
    let eig = eigenvalues_sym(&m);
    let nu = dotv(u, u).sqrt();
    let nv = dotv(v, v).sqrt();
    let prod = nu * nv;
    let cos = if prod > 0.0 { dotv(u, v) / prod } else { 0.0 };
    let top = prod * (1.0 + cos);
    let bottom = -prod * (1.0 - cos);
    let n = eig.len();
    let tol = 1e-10 * (1.0 + prod);
    ensure((eig[0] - top).abs() <= tol, || format!("largest {} vs {top}", eig[0]))?;
    ensure((eig[n - 1] - bottom).abs() <= tol, || format!("smallest {} vs {bottom}", eig[n - 1]))?;
    for &e in &eig[1..n - 1] {
        ensure(e.abs() <= tol, || format!("middle eigenvalue {e}"))?;
    }
    Ok(())
}

pub fn psd_split_reconstructs(m: &DenseMatrix) -> Check {
    let s = m.symmetrize();
    let (p, q) = psd_split(&s).map_err(|e| e.to_string())?;
    let err = p.sub(&q).sub(&s).max_abs();
    ensure(err <= 1e-10 * (1.0 + s.max_abs()), || format!("reconstruction error {err:e}"))?;
    ensure(eigenvalues_sym(&p).last().copied().unwrap_or(0.0) >= -1e-10, || "M₊ not PSD".into())?;
    ensure(eigenvalues_sym(&q).last().copied().unwrap_or(0.0) >= -1e-10, || "M₋ not PSD".into())
}

// rank-1 certification identities

/// Both branch formulas of η₀ coincide on the switching curve.
pub fn eta0_branch_continuity(alpha: f64) -> Check {
    let c = (1.0 - alpha * alpha).sqrt();
    let beta = alpha / (1.0 + c);
    let a = (1.0 - c) / (1.0 + c);
    let b = beta * (beta - alpha) / (beta * alpha - 1.0);
    ensure((a - b).abs() <= 1e-12, || format!("α={alpha}: {a} vs {b}"))?;
    let lib = eta0_from(alpha, beta);
    ensure((lib - a).abs() <= 1e-12, || format!("library {lib} vs {a}"))
}

/// η₀(α, β) equals min of Ψ over a uniform grid on [0, α].
pub fn eta0_variational(alpha: f64, beta: f64, grid: usize) -> Check {
    let ref_min = (0..=grid)
        .map(|k| {
            let g = alpha * k as f64 / grid as f64;
            let psi = g * alpha + (1.0 - g * g).sqrt() * (1.0 - alpha * alpha).sqrt();
            (2.0 * beta * g + 1.0 - psi) / (1.0 + psi)
        })
        .fold(f64::INFINITY, f64::min);
    let lib = eta0_from(alpha, beta);
    ensure(lib <= ref_min + 1e-12, || format!("η₀ {lib} above grid min {ref_min}"))?;
    ensure(ref_min - lib <= 1e-8, || format!("η₀ {lib} vs grid min {ref_min}"))?;
    // the library Ψ agrees with the reference formula
    let g = 0.5 * alpha;
    let psi = g * alpha + (1.0 - g * g).sqrt() * (1.0 - alpha * alpha).sqrt();
    let r = (2.0 * beta * g + 1.0 - psi) / (1.0 + psi);
    ensure((Psi(g, alpha, beta) - r).abs() <= 1e-14, || "Ψ mismatch".into())
}

/// λ_r(ZZᵀ)‖Z − X‖² ≤ ‖ZZᵀ − XXᵀ‖²/(2(√2−1)) for X aligned with Z.
pub fn error_lower_bound(x: &DenseMatrix, z: &DenseMatrix) -> Check {
    let xa = rankcert::certify::align_factors(x, z).map_err(|e| e.to_string())?;
    let (lhs, rhs) = error_ratio_check(&xa, z).map_err(|e| e.to_string())?;
    // independent recomputation of the right side
    let e = xa.matmul(&xa.transpose()).sub(&z.matmul(&z.transpose()));
    let rhs_ref = e.frobenius_norm().powi(2) / (2.0 * (SQRT_2 - 1.0));
    ensure((rhs - rhs_ref).abs() <= 1e-10 * (1.0 + rhs_ref), || "rhs mismatch".into())?;
    ensure(lhs <= rhs + 1e-10 * (1.0 + rhs), || format!("{lhs} > {rhs}"))
}

// constructions

pub fn basis_orthonormal(signs: &[f64]) -> Check {
    let a1 = first_measurement(signs);
    let mut all = vec![vec_cols(&a1)];
    all.extend(completed_basis(&a1).iter().map(vec_cols));
    let d = all.len();
    ensure(d == signs.len().pow(2), || format!("{d} basis elements"))?;
    for i in 0..d {
        for j in 0..d {
            let g = dotv(&all[i], &all[j]);
            let want = if i == j { 1.0 } else { 0.0 };
            ensure((g - want).abs() <= 1e-12, || format!("Gram[{i},{j}] = {g}"))?;
        }
    }
    Ok(())
}

/// Σ_{i≥2}⟨Aᵢ,M⟩² + ⟨A₁,M⟩² = ‖M‖_F².
pub fn operator_energy(signs: &[f64], m: &DenseMatrix) -> Check {
    let a1 = first_measurement(signs);
    let rest: f64 = completed_basis(&a1).iter().map(|a| a.inner(m).powi(2)).sum();
    let total = rest + a1.inner(m).powi(2);
    let f2 = m.frobenius_norm().powi(2);
    ensure((total - f2).abs() <= 1e-12 * f2.max(1e-300), || format!("{total} vs {f2}"))
}

/// |⟨A₁,M⟩| ≤ √(2r/n)‖M‖_F for M of rank ≤ 2r.
pub fn trace_bound(signs: &[f64], m: &DenseMatrix, r: usize) -> Check {
    let n = signs.len() as f64;
    let lhs = first_measurement(signs).inner(m).abs();
    let rhs = (2.0 * r as f64 / n).sqrt() * m.frobenius_norm();
    ensure(lhs <= rhs + 1e-10, || format!("{lhs} > {rhs}"))
}

/// Second difference of f along K, Richardson-extrapolated, against
/// [∇²f(V)](K, K).
pub fn extension_fd(ext: &BumpExtension, v: &DenseMatrix, k: &DenseMatrix) -> Check {
    let f = |t: f64| ext.value(&v.add(&k.scale(t)));
    let d2 = |h: f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    let h = 1e-2 * v.frobenius_norm().max(1e-3);
    let fd = (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
    let hess = rankcert::constructions::extension_hessian(&rankcert::constructions::ScaledPoint::from_matrix(v), ext);
    let exact = hess.quad(k);
    ensure((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-2), || format!("fd {fd} vs hessian {exact}"))
}

// 1-bit

pub fn curvature_envelope(mstar: &DenseMatrix, radius: f64, m: &DenseMatrix, k: &DenseMatrix) -> Check {
    let c = local_constants(mstar, radius, 1).map_err(|e| e.to_string())?;
    let q = loglik_hessian(m).quad(k);
    let k2 = k.frobenius_norm().powi(2);
    ensure(c.m2 * k2 - 1e-10 <= q && q <= c.m1 * k2 + 1e-10, || {
        format!("{q} outside [{}, {}]", c.m2 * k2, c.m1 * k2)
    })
}

pub fn bdp_envelope(
    mstar: &DenseMatrix,
    radius: f64,
    m: &DenseMatrix,
    mp: &DenseMatrix,
    k: &DenseMatrix,
    l: &DenseMatrix,
) -> Check {
    let c = local_constants(mstar, radius, 1).map_err(|e| e.to_string())?;
    let d = (loglik_hessian(m).eval(k, l) - loglik_hessian(mp).eval(k, l)).abs();
    let bound = c.m3 * k.frobenius_norm() * l.frobenius_norm();
    ensure(d <= bound + 1e-10, || format!("{d} > {bound}"))?;
    ensure(c.kappa == Some(c.gamma_scale * c.m3), || "κ ≠ γm₃".into())
}

pub fn scaling_midpoint(mstar: &DenseMatrix, radius: f64) -> Check {
    let c = local_constants(mstar, radius, 2).map_err(|e| e.to_string())?;
    let mid = 0.5 * (c.gamma_scale * c.m1 + c.gamma_scale * c.m2);
    ensure((mid - 1.0).abs() <= 1e-15, || format!("midpoint {mid}"))?;
    ensure(c.m1 >= c.m2 && c.m2 > 0.0, || "m₁ ≥ m₂ > 0 fails".into())
}

pub fn sigma_prime_even(x: f64) -> Check {
    let a = sigma_prime(x);
    let b = sigma_prime(-x);
    // reference e^x/(1+e^x)² where it does not overflow
    if x.abs() < 30.0 {
        let e = x.exp();
        let r = e / (1.0 + e).powi(2);
        ensure((a - r).abs() <= 1e-15, || format!("σ′({x}) = {a} vs {r}"))?;
    }
    ensure((a - b).abs() <= 1e-15, || format!("σ′({x}) = {a}, σ′(−x) = {b}"))
}

/// A point of the Frobenius ball of radius R around M*, in direction D.
pub fn in_ball(mstar: &DenseMatrix, d: &DenseMatrix, frac: f64, radius: f64) -> DenseMatrix {
    let nd = d.frobenius_norm();
    if nd == 0.0 {
        return mstar.clone();
    }
    mstar.add(&d.scale(frac * radius / nd))
}
