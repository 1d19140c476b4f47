//! Dense linear algebra on the small matrices this crate works with.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; vectorization always stacks
//! columns, so `vec(E_ij)` has its one at index `j * n + i`.

mod dense;
mod linalg;
mod text;
mod vecops;

pub use dense::{dot, norm, DenseMatrix};
pub use linalg::{
    backward_substitute_transposed, cholesky, cholesky_solve, complete_orthonormal, eig_sym,
    eigenvalues_sym, forward_substitute, lower_inverse, min_eigenvalue, psd_split, rank,
    spd_inverse_from_factor, svd, EigenDecomposition, Svd, SYMMETRY_TOL,
};
pub use text::{format_matrix, parse_matrix, read_matrix, write_matrix};
pub use vecops::{kron, kron_vec, mat, square_side, unvec, vec, vec_cols, x_operator};
