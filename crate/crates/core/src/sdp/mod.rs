//! A small dense interior-point solver for linear objectives over several
//! affine PSD blocks.

mod elimination;
mod problem;
mod solver;
mod verify;

pub use elimination::{eliminate, LinearEqualities, ReducedProblem};
pub use problem::{AffineBlock, Coeff, SdpProblem};
pub use solver::{solve, IterateRecord, SdpSolution, SdpStatus, SolverOptions};
pub use verify::{verify, FeasibilityReport};
