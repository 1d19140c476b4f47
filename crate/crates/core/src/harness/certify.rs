use std::fmt;

use crate::certify::{
    align_factors, build_instance, delta_f_sdp_with, delta_sdp_with, global_threshold, local_threshold,
    relative_error, CertifyResult, EPSILON_MAX,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::sdp::{SdpStatus, SolverOptions};

/// A δ equal to a threshold up to this margin counts as not certified.
pub const VERDICT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub kappa: f64,
    /// radius of the local region; defaults to the pair's own relative error
    pub epsilon: Option<f64>,
    /// RIP constant of the function under test; defaults to the SDP values
    pub delta: Option<f64>,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Global,
    Local { epsilon: f64 },
    NotCertified,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Global | Verdict::Local { .. } => 0,
            Verdict::NotCertified => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Global => write!(f, "globally certified"),
            Verdict::Local { epsilon } => write!(f, "locally certified within epsilon={epsilon:.6}"),
            Verdict::NotCertified => write!(f, "not certified"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub delta_sdp: CertifyResult,
    /// δ_f of the aligned pair, computed whenever the local region applies
    pub delta_f_sdp: Option<CertifyResult>,
    pub analytic_lower_bound: Option<f64>,
    pub relative_error: Option<f64>,
    pub epsilon: Option<f64>,
    pub global_threshold: f64,
    pub local_threshold: Option<f64>,
    pub verdict: Verdict,
}

impl fmt::Display for CertifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.delta_sdp;
        writeln!(f, "delta_sdp = {:.6} (status {}, {} iterations)", d.delta, d.status, d.iterations)?;
        if let Some(df) = &self.delta_f_sdp {
            writeln!(f, "delta_f_sdp = {:.6} (status {})", df.delta, df.status)?;
        }
        if let Some(lb) = self.analytic_lower_bound {
            writeln!(f, "closed-form lower bound = {lb:.6}")?;
        }
        if let Some(e) = self.relative_error {
            writeln!(f, "relative error = {e:.6}")?;
        }
        writeln!(f, "global threshold = {:.6}", self.global_threshold)?;
        match (self.epsilon, self.local_threshold) {
            (Some(e), Some(t)) => writeln!(f, "local threshold at epsilon={e:.6} = {t:.6}")?,
            _ => writeln!(f, "local threshold = n/a (epsilon outside (0, {EPSILON_MAX:.6}])")?,
        }
        write!(f, "verdict: {}", self.verdict)
    }
}

/// Solves δ(X, Z; κ) and, when X lies in a valid local region, δ_f of the
/// aligned pair, then compares the tested δ against both thresholds with
/// strict inequality.
pub fn certify_pair(x: &DenseMatrix, z: &DenseMatrix, opts: &CertifyOptions) -> Result<CertifyReport> {
    let inst = build_instance(x, z, opts.kappa)?;
    inst.require_nondegenerate()?;
    let dres = delta_sdp_with(&inst, &opts.solver)?;
    if dres.status != SdpStatus::Optimal {
        return Err(Error::Solver(format!("delta SDP ended {}: {}", dres.status, dres.diagnostics)));
    }
    let gthr = global_threshold(opts.kappa)?;
    let rel = relative_error(x, z).ok();
    let eps = match (opts.epsilon, rel) {
        (Some(e), Some(r)) if r <= e => Some(e),
        (Some(_), _) => None,
        (None, r) => r,
    }
    .filter(|e| *e > 0.0 && *e <= EPSILON_MAX);
    let lthr = eps.map(local_threshold).transpose()?;
    let dfres = match eps {
        Some(_) => {
            let xa = align_factors(x, z)?;
            let res = delta_f_sdp_with(&xa, z, &opts.solver)?;
            (res.status == SdpStatus::Optimal).then_some(res)
        }
        None => None,
    };
    let tested_global = opts.delta.unwrap_or(dres.delta);
    let verdict = if tested_global < gthr - VERDICT_MARGIN {
        Verdict::Global
    } else {
        match (eps, lthr, opts.delta.or(dfres.as_ref().map(|r| r.delta))) {
            (Some(e), Some(t), Some(d)) if d < t - VERDICT_MARGIN => Verdict::Local { epsilon: e },
            _ => Verdict::NotCertified,
        }
    };
    Ok(CertifyReport {
        analytic_lower_bound: dres.analytic_lower_bound,
        delta_sdp: dres,
        delta_f_sdp: dfres,
        relative_error: rel,
        epsilon: eps,
        global_threshold: gthr,
        local_threshold: lthr,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(kappa: f64) -> CertifyOptions {
        CertifyOptions {
            kappa,
            epsilon: None,
            delta: None,
            solver: SolverOptions::default(),
        }
    }

    #[test]
    fn orthogonal_pair_is_on_the_boundary() {
        let x = DenseMatrix::column(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let z = DenseMatrix::column(&[0.0, 2f64.sqrt(), 0.0, 0.0, 0.0]);
        let rep = certify_pair(&x, &z, &opts(0.0)).unwrap();
        assert!((rep.delta_sdp.delta - 0.5).abs() < 5e-3);
        assert!((rep.global_threshold - 0.5).abs() < 1e-15);
        assert_eq!(rep.verdict, Verdict::NotCertified);
        assert_eq!(rep.verdict.exit_code(), 2);

        let rep = certify_pair(&x, &z, &CertifyOptions { delta: Some(0.4), ..opts(0.0) }).unwrap();
        assert_eq!(rep.verdict, Verdict::Global);
    }

    #[test]
    fn large_kappa_clamps_threshold() {
        let x = DenseMatrix::column(&[1.0, 0.2, 0.0]);
        let z = DenseMatrix::column(&[0.3, 1.0, 0.5]);
        let rep = certify_pair(&x, &z, &opts(0.2)).unwrap();
        assert_eq!(rep.global_threshold, 0.0);
        assert_ne!(rep.verdict, Verdict::Global);
    }

    #[test]
    fn identical_factors_are_an_error() {
        let z = DenseMatrix::column(&[1.0, 2.0, 3.0]);
        assert!(matches!(certify_pair(&z, &z, &opts(0.0)), Err(Error::Degenerate)));
    }
}
