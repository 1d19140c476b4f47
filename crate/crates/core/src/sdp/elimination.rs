//! Linear equality constraints `E y = f` handled by substituting
//! `y = y₀ + N t`, where `t` ranges over the free variables of the reduced
//! row echelon form of `E`.

use super::problem::{AffineBlock, Coeff, SdpProblem};
use super::solver::{solve, SdpSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Rows of `matrix · y = rhs`.
#[derive(Debug, Clone)]
pub struct LinearEqualities {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

impl LinearEqualities {
    pub fn new(matrix: DenseMatrix, rhs: Vec<f64>) -> Result<Self> {
        if matrix.rows() != rhs.len() {
            return Err(Error::Dimension(format!(
                "{} equality rows but {} right-hand sides",
                matrix.rows(),
                rhs.len()
            )));
        }
        Ok(Self { matrix, rhs })
    }

    pub fn residual(&self, y: &[f64]) -> f64 {
        let ey = self.matrix.matvec(y);
        ey.iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// An SDP over the free variables together with the map back to the
/// original variables.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub problem: SdpProblem,
    pub original_nvars: usize,
    /// original index of each free variable
    pub free: Vec<usize>,
    /// (original index, value of y₀, coefficients on the free variables) per pivot
    pub pivots: Vec<(usize, f64, Vec<f64>)>,
    /// cᵀy₀, dropped from the reduced objective
    pub objective_offset: f64,
}

impl ReducedProblem {
    /// y = y₀ + N t
    pub fn expand(&self, t: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.original_nvars];
        for (&f, &v) in self.free.iter().zip(t) {
            y[f] = v;
        }
        for (p, y0, row) in &self.pivots {
            y[*p] = y0 + row.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
        }
        y
    }

    /// Solves the reduced problem and reports the primal in original
    /// variables. Block duals are unchanged by the substitution.
    pub fn solve(&self, opts: &SolverOptions) -> SdpSolution {
        let mut sol = solve(&self.problem, opts);
        sol.primal = self.expand(&sol.primal);
        sol.objective_value += self.objective_offset;
        sol
    }
}

/// Gauss-Jordan elimination with full pivoting on `eq`, then substitution
/// into `p`. Fails when the equalities are inconsistent or leave no freedom.
pub fn eliminate(p: &SdpProblem, eq: &LinearEqualities, tol: f64) -> Result<ReducedProblem> {
    let n = p.nvars;
    if eq.matrix.cols() != n {
        return Err(Error::Dimension(format!(
            "equalities act on {} variables, problem has {n}",
            eq.matrix.cols()
        )));
    }
    let mut a = eq.matrix.clone();
    let mut b = eq.rhs.clone();
    let rows = a.rows();
    let scale = a.max_abs().max(1.0);
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    for rank in 0..rows {
        let mut best = (0.0, 0, 0);
        for i in rank..rows {
            for j in (0..n).filter(|&j| !used[j]) {
                if a[(i, j)].abs() > best.0 {
                    best = (a[(i, j)].abs(), i, j);
                }
            }
        }
        let (mag, pr, pc) = best;
        if mag <= tol * scale {
            break;
        }
        if pr != rank {
            for j in 0..n {
                let t = a[(rank, j)];
                a[(rank, j)] = a[(pr, j)];
                a[(pr, j)] = t;
            }
            b.swap(rank, pr);
        }
        let piv = a[(rank, pc)];
        for j in 0..n {
            a[(rank, j)] /= piv;
        }
        b[rank] /= piv;
        for i in (0..rows).filter(|&i| i != rank) {
            let f = a[(i, pc)];
            if f != 0.0 {
                for j in 0..n {
                    a[(i, j)] -= f * a[(rank, j)];
                }
                b[i] -= f * b[rank];
            }
        }
        used[pc] = true;
        pivot_cols.push(pc);
    }
    let rank = pivot_cols.len();
    let bscale = eq.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if let Some(bad) = b[rank..].iter().find(|v| v.abs() > tol * bscale) {
        return Err(Error::Range(format!("inconsistent equality constraints (residual {bad:e})")));
    }
    let free: Vec<usize> = (0..n).filter(|&j| !used[j]).collect();
    if free.is_empty() {
        return Err(Error::Unsupported("equality constraints fix every variable".into()));
    }
    let pivots: Vec<(usize, f64, Vec<f64>)> = pivot_cols
        .iter()
        .enumerate()
        .map(|(s, &pc)| (pc, b[s], free.iter().map(|&f| -a[(s, f)]).collect()))
        .collect();

    let mut objective: Vec<f64> = free.iter().map(|&f| p.objective[f]).collect();
    let mut offset = 0.0;
    for (pc, y0, row) in &pivots {
        let c = p.objective[*pc];
        offset += c * y0;
        for (o, r) in objective.iter_mut().zip(row) {
            *o += c * r;
        }
    }
    let blocks = p
        .blocks
        .iter()
        .map(|blk| {
            let mut constant = blk.constant.clone();
            for (pc, y0, _) in &pivots {
                blk.coeffs[*pc].add_scaled_into(*y0, &mut constant);
            }
            let coeffs = free
                .iter()
                .enumerate()
                .map(|(k, &f)| {
                    let mut terms: Vec<(f64, &Coeff)> = vec![(1.0, &blk.coeffs[f])];
                    for (pc, _, row) in &pivots {
                        if row[k] != 0.0 {
                            terms.push((row[k], &blk.coeffs[*pc]));
                        }
                    }
                    if terms.len() == 1 {
                        blk.coeffs[f].clone()
                    } else {
                        Coeff::combine(&terms, blk.dim)
                    }
                })
                .collect();
            AffineBlock::new(constant.symmetrize(), coeffs)
        })
        .collect();
    Ok(ReducedProblem {
        problem: SdpProblem::new(objective, blocks)?,
        original_nvars: n,
        free,
        pivots,
        objective_offset: offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::SdpStatus;

    #[test]
    fn equality_pins_a_variable() {
        // minimize y0 + y1 with [y0 y1; y1 1] ⪰ 0 and y1 = -2: optimum y0 = 4
        let blk = AffineBlock::new(
            DenseMatrix::from_diag(&[0.0, 1.0]),
            vec![Coeff::sym_unit(0, 0, 1.0), Coeff::sym_unit(0, 1, 1.0)],
        );
        let p = SdpProblem::new(vec![1.0, 1.0], vec![blk]).unwrap();
        let eq = LinearEqualities::new(DenseMatrix::from_rows(&[&[0.0, 1.0]]), vec![-2.0]).unwrap();
        let red = eliminate(&p, &eq, 1e-12).unwrap();
        assert_eq!(red.problem.nvars, 1);
        let sol = red.solve(&SolverOptions::default());
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal[0] - 4.0).abs() < 1e-6, "{:?}", sol.primal);
        assert!((sol.primal[1] + 2.0).abs() < 1e-12);
        assert!((sol.objective_value - 2.0).abs() < 1e-6);
        assert!(eq.residual(&sol.primal) < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_and_overdetermined() {
        let blk = AffineBlock::new(DenseMatrix::identity(1), vec![Coeff::sym_unit(0, 0, 1.0); 2]);
        let p = SdpProblem::new(vec![1.0, 0.0], vec![blk]).unwrap();
        let bad = LinearEqualities::new(
            DenseMatrix::from_rows(&[&[1.0, 1.0], &[2.0, 2.0]]),
            vec![1.0, 3.0],
        )
        .unwrap();
        assert!(eliminate(&p, &bad, 1e-12).is_err());
        let full = LinearEqualities::new(DenseMatrix::identity(2), vec![1.0, 1.0]).unwrap();
        assert!(eliminate(&p, &full, 1e-12).is_err());
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let blk = AffineBlock::new(DenseMatrix::identity(1), vec![Coeff::sym_unit(0, 0, 1.0); 3]);
        let p = SdpProblem::new(vec![1.0, 0.0, 0.0], vec![blk]).unwrap();
        let eq = LinearEqualities::new(
            DenseMatrix::from_rows(&[&[0.0, 1.0, -1.0], &[0.0, 2.0, -2.0]]),
            vec![0.0, 0.0],
        )
        .unwrap();
        let red = eliminate(&p, &eq, 1e-12).unwrap();
        assert_eq!(red.problem.nvars, 2);
        let y = red.expand(&[0.5, 0.25]);
        assert!(eq.residual(&y) < 1e-15);
    }
}
