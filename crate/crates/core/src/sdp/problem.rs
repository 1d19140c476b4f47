use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A symmetric coefficient matrix of one variable inside one block.
///
/// Sparse entries list every stored position explicitly, so an off-diagonal
/// pair appears twice: `(i, j, v)` and `(j, i, v)`.
#[derive(Debug, Clone)]
pub enum Coeff {
    Zero,
    Sparse(Vec<(usize, usize, f64)>),
    Dense(DenseMatrix),
}

impl Coeff {
    /// v · (E_ij + E_ji) for i ≠ j, v · E_ii otherwise.
    pub fn sym_unit(i: usize, j: usize, v: f64) -> Self {
        if i == j {
            Coeff::Sparse(vec![(i, i, v)])
        } else {
            Coeff::Sparse(vec![(i, j, v), (j, i, v)])
        }
    }

    pub fn scaled_identity(dim: usize, v: f64) -> Self {
        Coeff::Sparse((0..dim).map(|i| (i, i, v)).collect())
    }

    /// Picks the cheaper representation for a dense symmetric matrix.
    pub fn from_dense(m: DenseMatrix) -> Self {
        let nnz = m.as_slice().iter().filter(|v| **v != 0.0).count();
        if nnz == 0 {
            Coeff::Zero
        } else if nnz * 4 <= m.rows() * m.cols() {
            let mut entries = Vec::with_capacity(nnz);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m[(i, j)] != 0.0 {
                        entries.push((i, j, m[(i, j)]));
                    }
                }
            }
            Coeff::Sparse(entries)
        } else {
            Coeff::Dense(m)
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Zero => true,
            Coeff::Sparse(e) => e.iter().all(|t| t.2 == 0.0),
            Coeff::Dense(m) => m.max_abs() == 0.0,
        }
    }

    pub fn nnz(&self, dim: usize) -> usize {
        match self {
            Coeff::Zero => 0,
            Coeff::Sparse(e) => e.len(),
            Coeff::Dense(_) => dim * dim,
        }
    }

    pub fn to_dense(&self, dim: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(dim, dim);
        self.add_scaled_into(1.0, &mut m);
        m
    }

    /// out += s · self
    pub fn add_scaled_into(&self, s: f64, out: &mut DenseMatrix) {
        if s == 0.0 {
            return;
        }
        match self {
            Coeff::Zero => {}
            Coeff::Sparse(e) => {
                for &(i, j, v) in e {
                    out[(i, j)] += s * v;
                }
            }
            Coeff::Dense(m) => out.axpy(s, m),
        }
    }

    /// ⟨self, m⟩
    pub fn inner(&self, m: &DenseMatrix) -> f64 {
        match self {
            Coeff::Zero => 0.0,
            Coeff::Sparse(e) => e.iter().map(|&(i, j, v)| v * m[(i, j)]).sum(),
            Coeff::Dense(a) => a.inner(m),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        match self {
            Coeff::Zero => 0.0,
            Coeff::Sparse(e) => e.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt(),
            Coeff::Dense(a) => a.frobenius_norm(),
        }
    }

    /// Σ wₖ · termsₖ, staying sparse when every term is sparse.
    pub fn combine(terms: &[(f64, &Coeff)], dim: usize) -> Coeff {
        let any_dense = terms
            .iter()
            .any(|(w, c)| *w != 0.0 && matches!(c, Coeff::Dense(_)));
        if any_dense {
            let mut m = DenseMatrix::zeros(dim, dim);
            for (w, c) in terms {
                c.add_scaled_into(*w, &mut m);
            }
            return Coeff::from_dense(m);
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (w, c) in terms {
            if *w == 0.0 {
                continue;
            }
            if let Coeff::Sparse(e) = c {
                for &(i, j, v) in e {
                    *acc.entry((i, j)).or_insert(0.0) += w * v;
                }
            }
        }
        let entries: Vec<_> = acc
            .into_iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        if entries.is_empty() {
            Coeff::Zero
        } else {
            Coeff::Sparse(entries)
        }
    }
}

/// One linear matrix inequality: constant + Σ yᵢ coeffsᵢ ⪰ 0.
#[derive(Debug, Clone)]
pub struct AffineBlock {
    pub dim: usize,
    pub constant: DenseMatrix,
    pub coeffs: Vec<Coeff>,
}

impl AffineBlock {
    pub fn new(constant: DenseMatrix, coeffs: Vec<Coeff>) -> Self {
        Self {
            dim: constant.rows(),
            constant,
            coeffs,
        }
    }

    /// Block value at a variable vector.
    pub fn value(&self, y: &[f64]) -> DenseMatrix {
        let mut m = self.constant.clone();
        for (c, &yi) in self.coeffs.iter().zip(y) {
            c.add_scaled_into(yi, &mut m);
        }
        m
    }

    /// Σ yᵢ coeffsᵢ without the constant.
    pub fn linear_part(&self, y: &[f64]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (c, &yi) in self.coeffs.iter().zip(y) {
            c.add_scaled_into(yi, &mut m);
        }
        m
    }

    pub fn has_variables(&self) -> bool {
        self.coeffs.iter().any(|c| !c.is_zero())
    }
}

/// minimize cᵀy subject to every block being positive semidefinite.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub nvars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<AffineBlock>,
}

impl SdpProblem {
    pub fn new(objective: Vec<f64>, blocks: Vec<AffineBlock>) -> Result<Self> {
        let nvars = objective.len();
        if nvars == 0 {
            return Err(Error::Dimension("an SDP needs at least one variable".into()));
        }
        for (b, blk) in blocks.iter().enumerate() {
            if blk.coeffs.len() != nvars {
                return Err(Error::Dimension(format!(
                    "block {b} has {} coefficients for {nvars} variables",
                    blk.coeffs.len()
                )));
            }
            if !blk.constant.is_square() || blk.constant.rows() != blk.dim || blk.dim == 0 {
                return Err(Error::Dimension(format!("block {b} constant is not {0}x{0}", blk.dim)));
            }
            if !blk.constant.is_symmetric(1e-12 * blk.constant.max_abs().max(1.0)) {
                return Err(Error::NotSymmetric(blk.constant.asymmetry()));
            }
            for (i, c) in blk.coeffs.iter().enumerate() {
                match c {
                    Coeff::Zero => {}
                    Coeff::Sparse(e) => {
                        let mut check = BTreeMap::new();
                        for &(r, s, v) in e {
                            if r >= blk.dim || s >= blk.dim {
                                return Err(Error::Dimension(format!(
                                    "block {b} coefficient {i} entry ({r},{s}) outside {0}x{0}",
                                    blk.dim
                                )));
                            }
                            *check.entry((r, s)).or_insert(0.0) += v;
                        }
                        for (&(r, s), &v) in &check {
                            let t = check.get(&(s, r)).copied().unwrap_or(0.0);
                            if (v - t).abs() > 1e-12 * v.abs().max(1.0) {
                                return Err(Error::NotSymmetric((v - t).abs()));
                            }
                        }
                    }
                    Coeff::Dense(m) => {
                        if m.shape() != (blk.dim, blk.dim) {
                            return Err(Error::Dimension(format!(
                                "block {b} coefficient {i} is {}x{}, expected {2}x{2}",
                                m.rows(),
                                m.cols(),
                                blk.dim
                            )));
                        }
                        if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
                            return Err(Error::NotSymmetric(m.asymmetry()));
                        }
                    }
                }
            }
        }
        Ok(Self {
            nvars,
            objective,
            blocks,
        })
    }

    pub fn objective_at(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// Aᵢ*(Z) = Σ_b ⟨A_{b,i}, Z_b⟩
    pub fn adjoint(&self, duals: &[DenseMatrix]) -> Vec<f64> {
        (0..self.nvars)
            .map(|i| {
                self.blocks
                    .iter()
                    .zip(duals)
                    .map(|(b, z)| b.coeffs[i].inner(z))
                    .sum()
            })
            .collect()
    }

    /// Dual objective −Σ ⟨C_b, Z_b⟩.
    pub fn dual_objective(&self, duals: &[DenseMatrix]) -> f64 {
        -self
            .blocks
            .iter()
            .zip(duals)
            .map(|(b, z)| b.constant.inner(z))
            .sum::<f64>()
    }

    /// Returns a copy with the objective scaled by `s`.
    pub fn with_scaled_objective(&self, s: f64) -> Self {
        Self {
            objective: self.objective.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }
}
