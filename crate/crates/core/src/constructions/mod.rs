//! Explicit objects behind the counterexamples: the tight RIP operator, the
//! bump extension that turns a pair of forms into one smooth function, and
//! sampled RIP/BDP estimates.

mod bdp;
mod bump;
mod form;
mod operator;

pub use bdp::{
    bdp_from_rip, estimate_bdp, rip_sweep, BasePointSampler, BdpProbe, RipBdpReport, RipMode, RipSweep,
};
pub use bump::{
    blend_condition, blend_hessian, blend_lambda_max, bump, bump_scaled, calibrate_extension,
    extension_hessian, BumpExtension, ScaledPoint,
};
pub use form::{FormRepr, QuadraticForm};
pub use operator::{
    bdp_gap_pair, completed_basis, first_measurement, gap_signs, tight_delta, tight_operator,
    tight_operator_dense, GapPair,
};
