//! The certification SDPs. Variable 0 is δ (or η); the remaining variables
//! are the upper triangle of the symmetric n²×n² matrix 𝐇, row by row.

use super::instance::Instance;
use super::rank1::delta_lower_bound_rank1;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::sdp::{
    eliminate, solve, AffineBlock, Coeff, LinearEqualities, SdpProblem, SdpSolution, SdpStatus,
    SolverOptions,
};

#[derive(Debug, Clone)]
pub struct CertifyResult {
    pub delta: f64,
    pub h: DenseMatrix,
    pub status: SdpStatus,
    pub analytic_lower_bound: Option<f64>,
    pub iterations: usize,
    pub diagnostics: String,
}

#[derive(Debug, Clone)]
pub struct EtaResult {
    pub eta: f64,
    pub h: DenseMatrix,
    pub status: SdpStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Program {
    Delta,
    DeltaFirstOrder,
    Eta,
    EtaFirstOrder,
}

impl Program {
    fn first_order(self) -> bool {
        matches!(self, Program::DeltaFirstOrder | Program::EtaFirstOrder)
    }

    fn is_eta(self) -> bool {
        matches!(self, Program::Eta | Program::EtaFirstOrder)
    }
}

/// Upper-triangle pairs (k, l), k ≤ l, of an N×N symmetric matrix.
fn pairs(big: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(big * (big + 1) / 2);
    for k in 0..big {
        for l in k..big {
            out.push((k, l));
        }
    }
    out
}

/// 𝐗ᵀ B_kl 𝐞 where B_kl = E_kl + E_lk (or E_kk).
fn xt_b_e(inst: &Instance, k: usize, l: usize) -> Vec<f64> {
    let m = inst.xop.cols();
    (0..m)
        .map(|i| {
            if k == l {
                inst.xop[(k, i)] * inst.e[k]
            } else {
                inst.xop[(k, i)] * inst.e[l] + inst.xop[(l, i)] * inst.e[k]
            }
        })
        .collect()
}

/// I_r ⊗ mat(B_kl 𝐞), accumulated into `out` with weight `w`.
fn add_kron_mat_be(inst: &Instance, k: usize, l: usize, w: f64, out: &mut DenseMatrix) {
    let n = inst.n();
    let r = inst.r();
    let mut add = |p: usize, v: f64| {
        // mat of a vector with one nonzero v at column-stacked index p
        let (i, j) = (p % n, p / n);
        for c in 0..r {
            out[(c * n + i, c * n + j)] += 0.5 * w * v;
            out[(c * n + j, c * n + i)] += 0.5 * w * v;
        }
    };
    if k == l {
        add(k, inst.e[k]);
    } else {
        add(k, inst.e[l]);
        add(l, inst.e[k]);
    }
}

fn build(inst: &Instance, prog: Program) -> Result<(SdpProblem, Option<LinearEqualities>)> {
    let n = inst.n();
    let r = inst.r();
    let big = n * n;
    let nr = n * r;
    let pr = pairs(big);
    let nvars = 1 + pr.len();
    let mut objective = vec![0.0; nvars];
    objective[0] = if prog.is_eta() { -1.0 } else { 1.0 };

    let mut blocks = Vec::new();

    // lower RIP block: H − (1−δ)I or H − ηI
    let mut coeffs = Vec::with_capacity(nvars);
    coeffs.push(Coeff::scaled_identity(big, if prog.is_eta() { -1.0 } else { 1.0 }));
    coeffs.extend(pr.iter().map(|&(k, l)| Coeff::sym_unit(k, l, 1.0)));
    let constant = if prog.is_eta() {
        DenseMatrix::zeros(big, big)
    } else {
        DenseMatrix::scaled_identity(big, -1.0)
    };
    blocks.push(AffineBlock::new(constant, coeffs));

    // upper RIP block: (1+δ)I − H or I − H
    let mut coeffs = Vec::with_capacity(nvars);
    coeffs.push(if prog.is_eta() {
        Coeff::Zero
    } else {
        Coeff::scaled_identity(big, 1.0)
    });
    coeffs.extend(pr.iter().map(|&(k, l)| Coeff::sym_unit(k, l, -1.0)));
    blocks.push(AffineBlock::new(DenseMatrix::identity(big), coeffs));

    if !prog.first_order() {
        // second-order condition
        let mut coeffs = Vec::with_capacity(nvars);
        coeffs.push(Coeff::Zero);
        let constant = if prog.is_eta() {
            if r != 1 {
                return Err(Error::Unsupported(
                    "the η relaxation with the second-order constraint is defined for r = 1 only".into(),
                ));
            }
            inst.xop
                .tmatmul(&inst.xop)
                .add(&DenseMatrix::scaled_identity(nr, inst.b))
        } else {
            DenseMatrix::scaled_identity(nr, inst.b)
        };
        for &(k, l) in &pr {
            let mut m = DenseMatrix::zeros(nr, nr);
            if !prog.is_eta() {
                // 𝐗ᵀ B_kl 𝐗 = P_k P_lᵀ + P_l P_kᵀ with P_k the k-th row of 𝐗
                let pk = inst.xop.row(k);
                let pl = inst.xop.row(l);
                let w = if k == l { 0.5 } else { 1.0 };
                for i in 0..nr {
                    for j in 0..nr {
                        m[(i, j)] += w * (pk[i] * pl[j] + pl[i] * pk[j]);
                    }
                }
            }
            add_kron_mat_be(inst, k, l, 2.0, &mut m);
            coeffs.push(Coeff::from_dense(m));
        }
        blocks.push(AffineBlock::new(constant.symmetrize(), coeffs));
    }

    let use_schur = !prog.first_order() && inst.a > 0.0;
    let mut equalities = None;
    if use_schur {
        // [[I, 𝐗ᵀH𝐞], [·, a²]] ⪰ 0
        let mut constant = DenseMatrix::identity(nr + 1);
        constant[(nr, nr)] = inst.a * inst.a;
        let mut coeffs = Vec::with_capacity(nvars);
        coeffs.push(Coeff::Zero);
        for &(k, l) in &pr {
            let g = xt_b_e(inst, k, l);
            let mut entries = Vec::new();
            for (i, &gi) in g.iter().enumerate() {
                if gi != 0.0 {
                    entries.push((i, nr, gi));
                    entries.push((nr, i, gi));
                }
            }
            coeffs.push(if entries.is_empty() {
                Coeff::Zero
            } else {
                Coeff::Sparse(entries)
            });
        }
        blocks.push(AffineBlock::new(constant, coeffs));
    } else {
        // 𝐗ᵀH𝐞 = 0
        let mut mat = DenseMatrix::zeros(nr, nvars);
        for (idx, &(k, l)) in pr.iter().enumerate() {
            for (i, gi) in xt_b_e(inst, k, l).into_iter().enumerate() {
                mat[(i, idx + 1)] = gi;
            }
        }
        equalities = Some(LinearEqualities::new(mat, vec![0.0; nr])?);
    }
    Ok((SdpProblem::new(objective, blocks)?, equalities))
}

fn run(inst: &Instance, prog: Program, opts: &SolverOptions) -> Result<SdpSolution> {
    inst.require_nondegenerate()?;
    let (p, eq) = build(inst, prog)?;
    Ok(match eq {
        Some(eq) => {
            let scale = inst.xop.max_abs().max(1.0) * inst.e_norm.max(1.0);
            eliminate(&p, &eq, 1e-12 * scale)?.solve(opts)
        }
        None => solve(&p, opts),
    })
}

fn unpack_h(n2: usize, y: &[f64]) -> DenseMatrix {
    let mut h = DenseMatrix::zeros(n2, n2);
    for (idx, (k, l)) in pairs(n2).into_iter().enumerate() {
        h[(k, l)] = y[idx + 1];
        h[(l, k)] = y[idx + 1];
    }
    h
}

fn delta_result(inst: &Instance, sol: SdpSolution, bound: Option<f64>) -> CertifyResult {
    let n2 = inst.n() * inst.n();
    CertifyResult {
        delta: sol.objective_value.clamp(0.0, 1.0),
        h: unpack_h(n2, &sol.primal),
        status: sol.status,
        analytic_lower_bound: bound,
        iterations: sol.iterations,
        diagnostics: sol.diagnostics,
    }
}

/// δ(X, Z; κ): the smallest RIP constant for which X can be a spurious
/// second-order critical point against the ground truth ZZᵀ.
pub fn delta_sdp(inst: &Instance) -> Result<CertifyResult> {
    delta_sdp_with(inst, &SolverOptions::default())
}

pub fn delta_sdp_with(inst: &Instance, opts: &SolverOptions) -> Result<CertifyResult> {
    let sol = run(inst, Program::Delta, opts)?;
    let bound = if inst.r() == 1 {
        Some(delta_lower_bound_rank1(&inst.x.col(0), &inst.z.col(0), inst.kappa)?)
    } else {
        None
    };
    Ok(delta_result(inst, sol, bound))
}

/// δ_f(X, Z): the same with only the first-order condition.
pub fn delta_f_sdp(x: &DenseMatrix, z: &DenseMatrix) -> Result<CertifyResult> {
    delta_f_sdp_with(x, z, &SolverOptions::default())
}

pub fn delta_f_sdp_with(x: &DenseMatrix, z: &DenseMatrix, opts: &SolverOptions) -> Result<CertifyResult> {
    let inst = super::build_instance(x, z, 0.0)?;
    let sol = run(&inst, Program::DeltaFirstOrder, opts)?;
    Ok(delta_result(&inst, sol, None))
}

/// η(x, z; κ), or η_f(X, Z) when `first_order_only` is set.
pub fn eta_sdp(inst: &Instance, first_order_only: bool) -> Result<EtaResult> {
    eta_sdp_with(inst, first_order_only, &SolverOptions::default())
}

pub fn eta_sdp_with(inst: &Instance, first_order_only: bool, opts: &SolverOptions) -> Result<EtaResult> {
    let prog = if first_order_only {
        Program::EtaFirstOrder
    } else {
        Program::Eta
    };
    let sol = run(inst, prog, opts)?;
    let n2 = inst.n() * inst.n();
    Ok(EtaResult {
        eta: -sol.objective_value,
        h: unpack_h(n2, &sol.primal),
        status: sol.status,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::build_instance;
    use crate::matrix::{eigenvalues_sym, mat, norm};

    fn col(v: &[f64]) -> DenseMatrix {
        DenseMatrix::column(v)
    }

    #[test]
    fn orthogonal_pair_reaches_one_half() {
        let x = col(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let z = col(&[0.0, 2f64.sqrt(), 0.0, 0.0, 0.0]);
        let inst = build_instance(&x, &z, 0.0).unwrap();
        let res = delta_sdp(&inst).unwrap();
        assert_eq!(res.status, SdpStatus::Optimal, "{}", res.diagnostics);
        assert!((res.delta - 0.5).abs() < 5e-3, "delta = {}", res.delta);
        assert!(res.delta >= res.analytic_lower_bound.unwrap() - 1e-4);
    }

    #[test]
    fn optimal_h_satisfies_constraints() {
        let x = col(&[0.3, -1.0, 0.5]);
        let z = col(&[1.0, 0.2, -0.4]);
        let inst = build_instance(&x, &z, 0.05).unwrap();
        let res = delta_sdp(&inst).unwrap();
        assert_eq!(res.status, SdpStatus::Optimal);
        let ev = eigenvalues_sym(&res.h);
        assert!(ev[0] <= 1.0 + res.delta + 1e-6);
        assert!(*ev.last().unwrap() >= 1.0 - res.delta - 1e-6);
        let he = res.h.matvec(&inst.e);
        let g = inst.xop.tmatvec(&he);
        assert!(norm(&g) <= inst.a + 1e-6);
        let second = mat(&he)
            .unwrap()
            .scale(2.0)
            .add(&inst.xop.tmatmul(&res.h.matmul(&inst.xop)))
            .add(&DenseMatrix::scaled_identity(3, inst.b));
        assert!(*eigenvalues_sym(&second).last().unwrap() >= -1e-6);
    }

    #[test]
    fn first_order_value_at_zero() {
        let res = delta_f_sdp(&DenseMatrix::zeros(3, 2), &DenseMatrix::from_fn(3, 2, |i, j| (i + j) as f64)).unwrap();
        assert_eq!(res.status, SdpStatus::Optimal);
        assert!(res.delta.abs() < 1e-6);
    }

    #[test]
    fn eta_requires_rank_one() {
        let inst = build_instance(&DenseMatrix::identity(2), &DenseMatrix::zeros(2, 2), 0.0).unwrap();
        assert!(matches!(eta_sdp(&inst, false), Err(Error::Unsupported(_))));
        assert!(eta_sdp(&inst, true).is_ok());
    }

    #[test]
    fn degenerate_is_rejected() {
        let x = col(&[1.0, 2.0]);
        let inst = build_instance(&x, &x.scale(-1.0), 0.1).unwrap();
        assert!(matches!(delta_sdp(&inst), Err(Error::Degenerate)));
    }
}
