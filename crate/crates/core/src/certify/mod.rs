//! Certification programs for a candidate spurious point X against a
//! ground truth Z: the δ and η semidefinite programs, closed-form rank-1
//! bounds, thresholds and explicit dual certificates.
//!
//! The letter γ is used for two unrelated quantities in this area; here the
//! dual multiplier of the rank-1 certificate is `gamma_dual`, the bump
//! exponent in [`crate::constructions`] is `gamma_exp` and the 1-bit scaling
//! in [`crate::onebit`] is `gamma_scale`.

mod instance;
mod local;
mod programs;
mod rank1;

pub use instance::{build_instance, Instance, DEGENERATE_TOL};
pub use local::{
    align_factors, angle_bound, check_aligned, dual_certificate_local, error_ratio_check,
    lambda_r, relative_error, rop_gap, LocalCertificate, ALIGN_TOL,
};
pub use programs::{
    delta_f_sdp, delta_f_sdp_with, delta_sdp, delta_sdp_with, eta_sdp, eta_sdp_with,
    CertifyResult, EtaResult,
};
pub use rank1::{
    best_dual_certificate_rank1, certificate_objective_rank1, check_dual,
    delta_lower_bound_rank1, dual_certificate_rank1, eta0, eta0_from, global_threshold,
    local_threshold, psi, psi_stationary_point, rank1_geometry, thresholds, DualCertificate,
    DualCheck, DualKind, Psi, Rank1Geometry, Thresholds, EPSILON_MAX, GAMMA_GRID,
};
