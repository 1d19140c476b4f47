use super::problem::SdpProblem;
use super::solver::SdpSolution;
use crate::matrix::{min_eigenvalue, norm};

/// Feasibility of a solution, recomputed from the problem data alone.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// Smallest eigenvalue of each primal block value.
    pub primal_min_eigenvalues: Vec<f64>,
    /// Smallest eigenvalue of each dual block.
    pub dual_min_eigenvalues: Vec<f64>,
    /// ‖A*(Z) − c‖.
    pub dual_residual: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// cᵀy − dual objective.
    pub gap: f64,
}

impl FeasibilityReport {
    pub fn worst_primal_eigenvalue(&self) -> f64 {
        self.primal_min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn worst_dual_eigenvalue(&self) -> f64 {
        self.dual_min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn primal_feasible(&self, tol: f64) -> bool {
        self.worst_primal_eigenvalue() >= -tol
    }

    pub fn dual_feasible(&self, tol: f64) -> bool {
        self.worst_dual_eigenvalue() >= -tol && self.dual_residual <= tol
    }
}

pub fn verify(p: &SdpProblem, s: &SdpSolution) -> FeasibilityReport {
    let primal_min_eigenvalues = p
        .blocks
        .iter()
        .map(|b| min_eigenvalue(&b.value(&s.primal)))
        .collect();
    let dual_min_eigenvalues = s.block_duals.iter().map(min_eigenvalue).collect();
    let atz = p.adjoint(&s.block_duals);
    let r: Vec<f64> = atz.iter().zip(&p.objective).map(|(a, c)| a - c).collect();
    let primal_objective = p.objective_at(&s.primal);
    let dual_objective = p.dual_objective(&s.block_duals);
    FeasibilityReport {
        primal_min_eigenvalues,
        dual_min_eigenvalues,
        dual_residual: norm(&r),
        primal_objective,
        dual_objective,
        gap: primal_objective - dual_objective,
    }
}
