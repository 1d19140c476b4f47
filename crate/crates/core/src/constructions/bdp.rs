//! RIP → BDP constants and sampled estimates of both properties for a
//! Hessian given as a rule V ↦ ∇²f(V).

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::sampling::{unit_low_rank, unit_low_rank_psd};

use super::bump::ScaledPoint;
use super::form::QuadraticForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RipMode {
    /// δ-RIP of rank 2r gives 4δ-BDP of rank 2r
    Rip2r,
    /// δ-RIP of rank (2r, 4r) gives 2δ-BDP of rank 2r
    Rip2r4r,
}

pub fn bdp_from_rip(delta: f64, mode: RipMode) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Range(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok(match mode {
        RipMode::Rip2r => 4.0 * delta,
        RipMode::Rip2r4r => 2.0 * delta,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct RipBdpReport {
    pub delta: f64,
    /// the constant implied by RIP → BDP
    pub kappa_upper: f64,
    /// a sampled lower bound on the true BDP constant
    pub kappa_empirical: f64,
}

/// A quadruple always included in the BDP estimate.
#[derive(Debug, Clone)]
pub struct BdpProbe {
    pub m: ScaledPoint,
    pub m_prime: ScaledPoint,
    pub k: DenseMatrix,
    pub l: DenseMatrix,
}

/// Where sampled base points live: rank-`rank` PSD directions with
/// ln ‖M‖² uniform on `ln_norm_sq`.
#[derive(Debug, Clone, Copy)]
pub struct BasePointSampler {
    pub rank: usize,
    pub ln_norm_sq: (f64, f64),
}

impl BasePointSampler {
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> ScaledPoint {
        let dir = unit_low_rank_psd(rng, n, self.rank);
        let (lo, hi) = self.ln_norm_sq;
        let ln = if hi > lo { rng.random_range(lo..hi) } else { lo };
        ScaledPoint {
            direction: dir,
            ln_norm_sq: ln,
        }
    }
}

fn normalized_gap(a: &QuadraticForm, b: &QuadraticForm, k: &DenseMatrix, l: &DenseMatrix) -> f64 {
    (a.eval(k, l) - b.eval(k, l)).abs() / (k.frobenius_norm() * l.frobenius_norm())
}

/// max over sampled (M, M′, K, L) of |[∇²f(M) − ∇²f(M′)](K,L)|/(‖K‖‖L‖),
/// with K, L of rank ≤ 2r. Every probe is evaluated in addition to the
/// `samples` random quadruples. The result never exceeds the true constant.
pub fn estimate_bdp<F, R>(
    hessian_at: F,
    n: usize,
    r: usize,
    samples: usize,
    base: BasePointSampler,
    probes: &[BdpProbe],
    rng: &mut R,
) -> f64
where
    F: Fn(&ScaledPoint) -> QuadraticForm,
    R: Rng + ?Sized,
{
    let mut best = 0.0f64;
    for p in probes {
        let a = hessian_at(&p.m);
        let b = hessian_at(&p.m_prime);
        best = best.max(normalized_gap(&a, &b, &p.k, &p.l));
    }
    for _ in 0..samples {
        let m = base.sample(n, rng);
        let mp = base.sample(n, rng);
        let k = unit_low_rank(rng, n, 2 * r);
        let l = unit_low_rank(rng, n, 2 * r);
        let a = hessian_at(&m);
        let b = hessian_at(&mp);
        best = best.max(normalized_gap(&a, &b, &k, &l));
    }
    best
}

/// Extremes of [∇²f(V)](K,K)/‖K‖² over sampled base points and rank-`k_rank`
/// directions.
#[derive(Debug, Clone, Copy)]
pub struct RipSweep {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub evaluations: usize,
}

impl RipSweep {
    /// Whether every ratio lies in [1 − δ, 1 + δ] up to `slack`.
    pub fn within(&self, delta: f64, slack: f64) -> bool {
        self.min_ratio >= 1.0 - delta - slack && self.max_ratio <= 1.0 + delta + slack
    }
}

pub fn rip_sweep<F, R>(
    hessian_at: F,
    n: usize,
    k_rank: usize,
    base_points: &[ScaledPoint],
    directions_per_point: usize,
    rng: &mut R,
) -> RipSweep
where
    F: Fn(&ScaledPoint) -> QuadraticForm,
    R: Rng + ?Sized,
{
    let mut out = RipSweep {
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        evaluations: 0,
    };
    for v in base_points {
        let h = hessian_at(v);
        for _ in 0..directions_per_point {
            let k = unit_low_rank(rng, n, k_rank);
            let ratio = h.quad(&k);
            out.min_ratio = out.min_ratio.min(ratio);
            out.max_ratio = out.max_ratio.max(ratio);
            out.evaluations += 1;
        }
    }
    out
}
