//! Infeasible-start primal-dual path following with HKM search directions
//! and Mehrotra predictor-corrector steps.
//!
//! The solver works on the LMI form
//!
//! ```text
//! minimize cᵀy  s.t.  S_b = C_b + Σᵢ yᵢ A_{b,i} ⪰ 0
//! ```
//!
//! whose conic dual is `maximize −Σ⟨C_b, Z_b⟩ s.t. Σ_b ⟨A_{b,i}, Z_b⟩ = cᵢ,
//! Z_b ⪰ 0`. Each iteration solves the Schur system
//! `M_ij = Σ_b tr(A_{b,i} Z_b A_{b,j} S_b⁻¹)` by dense Cholesky.

use super::problem::{Coeff, SdpProblem};
use crate::matrix::{cholesky, cholesky_solve, dot, lower_inverse, min_eigenvalue, norm, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

impl SdpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
            SdpStatus::MaxIter => "max-iter",
        }
    }
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Absolute primal residual bound (Frobenius) and relative dual residual bound.
    pub feas_tol: f64,
    /// Duality gap bound, relative to 1 + |objective|.
    pub gap_tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-8,
            max_iter: 200,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IterateRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub objective_value: f64,
    pub primal: Vec<f64>,
    pub block_duals: Vec<DenseMatrix>,
    pub duality_gap: f64,
    pub iterations: usize,
    pub diagnostics: String,
    pub history: Vec<IterateRecord>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

/// Per-block bookkeeping for Schur assembly.
struct BlockPlan {
    index: usize,
    dim: usize,
    /// active positions whose coefficient is multiplied out as Z A Sinv
    routed: Vec<usize>,
    /// active positions paired entry-by-entry
    direct: Vec<usize>,
}

struct Workspace<'a> {
    p: &'a SdpProblem,
    active: Vec<usize>,
    plans: Vec<BlockPlan>,
}

impl Workspace<'_> {
    fn coeff(&self, plan: &BlockPlan, k: usize) -> &Coeff {
        &self.p.blocks[plan.index].coeffs[self.active[k]]
    }

    /// Σ_k dy_k A_{b,k} for each planned block.
    fn apply(&self, dy: &[f64]) -> Vec<DenseMatrix> {
        self.plans
            .iter()
            .map(|plan| {
                let mut m = DenseMatrix::zeros(plan.dim, plan.dim);
                for (k, &v) in dy.iter().enumerate() {
                    self.coeff(plan, k).add_scaled_into(v, &mut m);
                }
                m
            })
            .collect()
    }

    fn adjoint(&self, mats: &[DenseMatrix]) -> Vec<f64> {
        let mut out = vec![0.0; self.active.len()];
        for (plan, m) in self.plans.iter().zip(mats) {
            for (k, o) in out.iter_mut().enumerate() {
                *o += self.coeff(plan, k).inner(m);
            }
        }
        out
    }

    fn schur(&self, z: &[DenseMatrix], sinv: &[DenseMatrix]) -> DenseMatrix {
        let m = self.active.len();
        let mut schur = DenseMatrix::zeros(m, m);
        for ((plan, zb), sb) in self.plans.iter().zip(z).zip(sinv) {
            let d = plan.dim;
            for (a, &k) in plan.routed.iter().enumerate() {
                let g = z_a_sinv(self.coeff(plan, k), zb, sb, d);
                for &j in plan.routed[a..].iter().chain(&plan.direct) {
                    let v = self.coeff(plan, j).inner(&g);
                    let (lo, hi) = if k <= j { (k, j) } else { (j, k) };
                    schur[(lo, hi)] += v;
                }
            }
            for (a, &k) in plan.direct.iter().enumerate() {
                let Coeff::Sparse(ek) = self.coeff(plan, k) else {
                    unreachable!("direct coefficients are sparse")
                };
                for &j in &plan.direct[a..] {
                    let Coeff::Sparse(ej) = self.coeff(plan, j) else {
                        unreachable!("direct coefficients are sparse")
                    };
                    let mut v = 0.0;
                    for &(p, q, av) in ek {
                        for &(s, t, bv) in ej {
                            v += av * bv * zb[(q, s)] * sb[(t, p)];
                        }
                    }
                    let (lo, hi) = if k <= j { (k, j) } else { (j, k) };
                    schur[(lo, hi)] += v;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                schur[(i, j)] = schur[(j, i)];
            }
        }
        schur
    }
}

/// Z A S⁻¹ for one coefficient.
fn z_a_sinv(a: &Coeff, z: &DenseMatrix, sinv: &DenseMatrix, d: usize) -> DenseMatrix {
    match a {
        Coeff::Zero => DenseMatrix::zeros(d, d),
        Coeff::Dense(m) => z.matmul(m).matmul(sinv),
        Coeff::Sparse(entries) => {
            let mut g = DenseMatrix::zeros(d, d);
            let gs = g.as_mut_slice();
            for &(p, q, v) in entries {
                let srow = sinv.row(q);
                for r in 0..d {
                    let w = v * z[(r, p)];
                    if w == 0.0 {
                        continue;
                    }
                    for (o, &s) in gs[r * d..(r + 1) * d].iter_mut().zip(srow) {
                        *o += w * s;
                    }
                }
            }
            g
        }
    }
}

/// Largest α with X + α dX ⪰ 0, given L⁻¹ for X = L Lᵀ.
fn max_step(linv: &DenseMatrix, dx: &DenseMatrix) -> f64 {
    let w = linv.matmul(dx).matmul(&linv.transpose());
    let lmin = min_eigenvalue(&w);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn frob_sum(ms: &[DenseMatrix]) -> f64 {
    ms.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn inner_sum(a: &[DenseMatrix], b: &[DenseMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn finish(
    p: &SdpProblem,
    status: SdpStatus,
    active: &[usize],
    y_active: &[f64],
    duals_active: Vec<(usize, DenseMatrix)>,
    iterations: usize,
    diagnostics: String,
    history: Vec<IterateRecord>,
) -> SdpSolution {
    let mut primal = vec![0.0; p.nvars];
    for (&k, &v) in active.iter().zip(y_active) {
        primal[k] = v;
    }
    let mut block_duals: Vec<DenseMatrix> =
        p.blocks.iter().map(|b| DenseMatrix::zeros(b.dim, b.dim)).collect();
    for (b, z) in duals_active {
        block_duals[b] = z;
    }
    let objective_value = p.objective_at(&primal);
    let duality_gap = (objective_value - p.dual_objective(&block_duals)).abs();
    SdpSolution {
        status,
        objective_value,
        primal,
        block_duals,
        duality_gap,
        iterations,
        diagnostics,
        history,
    }
}

/// Solves `p`. Never panics on numerical trouble; breakdowns are reported as
/// [`SdpStatus::MaxIter`] with a diagnostic message.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    // Blocks without variables are checked once and dropped.
    let mut plans = Vec::new();
    for (b, blk) in p.blocks.iter().enumerate() {
        if blk.has_variables() {
            plans.push(BlockPlan {
                index: b,
                dim: blk.dim,
                routed: Vec::new(),
                direct: Vec::new(),
            });
        } else {
            let lmin = min_eigenvalue(&blk.constant);
            if lmin < -opts.feas_tol {
                return finish(
                    p,
                    SdpStatus::Infeasible,
                    &[],
                    &[],
                    Vec::new(),
                    0,
                    format!("block {b} has no variables and a constant with eigenvalue {lmin:e}"),
                    Vec::new(),
                );
            }
        }
    }
    let mut active = Vec::new();
    for i in 0..p.nvars {
        let used = plans.iter().any(|pl| !p.blocks[pl.index].coeffs[i].is_zero());
        if used {
            active.push(i);
        } else if p.objective[i] != 0.0 {
            return finish(
                p,
                SdpStatus::Unbounded,
                &[],
                &[],
                Vec::new(),
                0,
                format!("variable {i} enters no constraint but has objective weight {}", p.objective[i]),
                Vec::new(),
            );
        }
    }
    if active.is_empty() {
        return finish(p, SdpStatus::Optimal, &[], &[], Vec::new(), 0, String::new(), Vec::new());
    }
    for plan in plans.iter_mut() {
        let blk = &p.blocks[plan.index];
        let d = plan.dim;
        let mut sparse = Vec::new();
        let mut sparse_nnz = 0;
        let mut dense = Vec::new();
        for (k, &i) in active.iter().enumerate() {
            match &blk.coeffs[i] {
                Coeff::Zero => {}
                Coeff::Sparse(e) => {
                    sparse_nnz += e.len();
                    sparse.push(k);
                }
                Coeff::Dense(_) => dense.push(k),
            }
        }
        if sparse_nnz <= 2 * d * d {
            plan.routed = dense;
            plan.direct = sparse;
        } else {
            dense.extend(sparse);
            dense.sort_unstable();
            plan.routed = dense;
        }
    }
    let ws = Workspace { p, active, plans };
    let m = ws.active.len();
    let c: Vec<f64> = ws.active.iter().map(|&i| p.objective[i]).collect();
    let cnorm = norm(&c);
    let total_dim: usize = ws.plans.iter().map(|pl| pl.dim).sum();

    // identity-scaled starting point
    let mut y = vec![0.0; m];
    let mut s: Vec<DenseMatrix> = Vec::new();
    let mut z: Vec<DenseMatrix> = Vec::new();
    for plan in &ws.plans {
        let blk = &p.blocks[plan.index];
        let d = plan.dim as f64;
        let mut xi: f64 = 10f64.max(d.sqrt());
        let mut zeta: f64 = 10f64.max(d.sqrt()).max(blk.constant.frobenius_norm());
        for (k, &i) in ws.active.iter().enumerate() {
            let an = blk.coeffs[i].norm();
            if an > 0.0 {
                xi = xi.max(d * (1.0 + c[k].abs()) / (1.0 + an));
                zeta = zeta.max(an);
            }
        }
        s.push(DenseMatrix::scaled_identity(plan.dim, zeta));
        z.push(DenseMatrix::scaled_identity(plan.dim, xi));
    }
    let z0_scale = frob_sum(&z).max(1.0);
    let constants: Vec<&DenseMatrix> = ws.plans.iter().map(|pl| &p.blocks[pl.index].constant).collect();
    let cmat_norm = constants.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt();

    let mut history = Vec::new();
    let mut tau: f64 = 0.9;
    let wrap = |status, y: &[f64], z: &[DenseMatrix], it, diag: String, hist: Vec<IterateRecord>| {
        let duals = ws.plans.iter().zip(z).map(|(pl, zb)| (pl.index, zb.clone())).collect();
        finish(p, status, &ws.active, y, duals, it, diag, hist)
    };

    for iter in 0..=opts.max_iter {
        let ay = ws.apply(&y);
        let rp: Vec<DenseMatrix> = (0..ws.plans.len())
            .map(|b| constants[b].add(&ay[b]).sub(&s[b]))
            .collect();
        let atz = ws.adjoint(&z);
        let rd: Vec<f64> = c.iter().zip(&atz).map(|(ci, ai)| ci - ai).collect();
        let pobj = dot(&c, &y);
        let dobj = -constants.iter().zip(&z).map(|(cb, zb)| cb.inner(zb)).sum::<f64>();
        let compl = inner_sum(&s, &z);
        let mu = compl / total_dim as f64;
        let rp_abs = frob_sum(&rp);
        let rd_rel = norm(&rd) / (1.0 + cnorm);
        let gap = (pobj - dobj).abs();
        if opts.record_history {
            history.push(IterateRecord {
                iteration: iter,
                primal_objective: pobj,
                dual_objective: dobj,
                primal_residual: rp_abs,
                dual_residual: rd_rel,
                complementarity: compl,
            });
        }
        let gap_bound = opts.gap_tol * (1.0 + pobj.abs());
        if rp_abs <= opts.feas_tol && rd_rel <= opts.feas_tol && gap <= gap_bound && compl <= gap_bound {
            return wrap(SdpStatus::Optimal, &y, &z, iter, String::new(), history);
        }

        // divergence heuristics
        let zn = frob_sum(&z);
        if zn > 1e8 * z0_scale && dobj / zn > 1e-9 && norm(&atz) / zn < 1e-6 {
            let diag = format!(
                "infeasibility certificate: dual ray with ‖Z‖={zn:e}, −⟨C,Z⟩/‖Z‖={:e}, ‖A*(Z)‖/‖Z‖={:e}",
                dobj / zn,
                norm(&atz) / zn
            );
            return wrap(SdpStatus::Infeasible, &y, &z, iter, diag, history);
        }
        let yn = norm(&y);
        if yn > 1e8 * (1.0 + cmat_norm) && pobj / yn < -1e-9 {
            let ray: Vec<f64> = y.iter().map(|v| v / yn).collect();
            let lin = ws.apply(&ray);
            let worst = lin.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
            if worst >= -1e-6 {
                let diag = format!(
                    "unboundedness certificate: improving ray with cᵀd={:e}, min eigenvalue of A(d)={worst:e}",
                    pobj / yn
                );
                return wrap(SdpStatus::Unbounded, &y, &z, iter, diag, history);
            }
        }
        if iter == opts.max_iter {
            break;
        }
        // accept a breakdown iterate that is already close to optimal
        let relaxed = 1e3 * opts.feas_tol.max(opts.gap_tol);
        let near_optimal = rp_abs <= relaxed
            && rd_rel <= relaxed
            && gap <= 1e3 * gap_bound
            && compl <= 1e3 * gap_bound;
        let breakdown = |what: String, history: Vec<IterateRecord>| {
            if near_optimal {
                let diag = format!("reduced accuracy: {what}; residuals {rp_abs:e}/{rd_rel:e}, gap {gap:e}");
                wrap(SdpStatus::Optimal, &y, &z, iter, diag, history)
            } else {
                wrap(SdpStatus::MaxIter, &y, &z, iter, what, history)
            }
        };

        // factorizations
        let mut ls_inv = Vec::with_capacity(s.len());
        let mut lz_inv = Vec::with_capacity(z.len());
        for b in 0..s.len() {
            let (Some(ls), Some(lz)) = (cholesky(&s[b]), cholesky(&z[b])) else {
                let diag = format!("numerical breakdown: iterate left the PSD cone in block {}", ws.plans[b].index);
                return breakdown(diag, history);
            };
            ls_inv.push(lower_inverse(&ls));
            lz_inv.push(lower_inverse(&lz));
        }
        let sinv: Vec<DenseMatrix> = ls_inv.iter().map(|l| l.tmatmul(l)).collect();
        let schur = ws.schur(&z, &sinv);
        let Some(lm) = factor_with_regularization(&schur) else {
            let diag = "numerical breakdown: Schur complement is not positive definite".to_string();
            return breakdown(diag, history);
        };

        // Solves for a direction given the complementarity target K (before Z A(dy) S⁻¹).
        let direction = |k: &[DenseMatrix]| {
            let ak = ws.adjoint(k);
            let rhs: Vec<f64> = ak.iter().zip(&rd).map(|(a, r)| a - r).collect();
            let dy = cholesky_solve(&lm, &rhs);
            let ady = ws.apply(&dy);
            let ds: Vec<DenseMatrix> = rp.iter().zip(&ady).map(|(r, a)| r.add(a)).collect();
            let dz: Vec<DenseMatrix> = (0..k.len())
                .map(|b| k[b].sub(&z[b].matmul(&ady[b]).matmul(&sinv[b])).symmetrize())
                .collect();
            (dy, ds, dz)
        };
        let steps = |ds: &[DenseMatrix], dz: &[DenseMatrix]| {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for b in 0..ds.len() {
                ap = ap.min(max_step(&ls_inv[b], &ds[b]));
                ad = ad.min(max_step(&lz_inv[b], &dz[b]));
            }
            (ap, ad)
        };

        // predictor
        let base: Vec<DenseMatrix> = (0..s.len())
            .map(|b| z[b].scale(-1.0).sub(&z[b].matmul(&rp[b]).matmul(&sinv[b])))
            .collect();
        let (_, ds_aff, dz_aff) = direction(&base);
        let (ap_max, ad_max) = steps(&ds_aff, &dz_aff);
        let ap = ap_max.min(1.0);
        let ad = ad_max.min(1.0);
        let mut mu_aff = 0.0;
        for b in 0..s.len() {
            let sn = s[b].add(&ds_aff[b].scale(ap));
            let zn = z[b].add(&dz_aff[b].scale(ad));
            mu_aff += sn.inner(&zn);
        }
        mu_aff /= total_dim as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        // corrector
        let k: Vec<DenseMatrix> = (0..s.len())
            .map(|b| {
                let mut kb = sinv[b].scale(sigma * mu);
                kb.axpy(1.0, &base[b]);
                kb.axpy(-1.0, &dz_aff[b].matmul(&ds_aff[b]).matmul(&sinv[b]));
                kb
            })
            .collect();
        let (dy, ds, dz) = direction(&k);
        let (ap_max, ad_max) = steps(&ds, &dz);
        let ap = (tau * ap_max).min(1.0);
        let ad = (tau * ad_max).min(1.0);
        for (v, d) in y.iter_mut().zip(&dy) {
            *v += ap * d;
        }
        for b in 0..s.len() {
            s[b].axpy(ap, &ds[b]);
            z[b].axpy(ad, &dz[b]);
        }
        tau = (0.9 + 0.09 * ap.min(ad)).clamp(0.9, 0.99);
    }
    wrap(
        SdpStatus::MaxIter,
        &y,
        &z,
        opts.max_iter,
        format!("iteration limit {} reached", opts.max_iter),
        history,
    )
}

fn factor_with_regularization(m: &DenseMatrix) -> Option<DenseMatrix> {
    if let Some(l) = cholesky(m) {
        return Some(l);
    }
    let scale = m.diag().iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    let mut reg = 1e-14 * scale;
    while reg <= 1e-8 * scale {
        let mut mm = m.clone();
        for i in 0..mm.rows() {
            mm[(i, i)] += reg;
        }
        if let Some(l) = cholesky(&mm) {
            return Some(l);
        }
        reg *= 100.0;
    }
    None
}
