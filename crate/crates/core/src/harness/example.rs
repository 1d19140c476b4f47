use std::fmt;

use crate::constructions::{
    bdp_gap_pair, blend_condition, blend_hessian, blend_lambda_max, calibrate_extension, estimate_bdp,
    extension_hessian, rip_sweep, tight_delta, BasePointSampler, BdpProbe, BumpExtension, RipSweep, ScaledPoint,
};
use crate::error::Result;
use crate::sampling::{rng_from_seed, unit_low_rank_psd, SampleRng};

#[derive(Debug, Clone)]
pub struct ExampleOptions {
    pub n: usize,
    pub r: usize,
    pub mu: f64,
    pub lambda: Option<f64>,
    /// total directions in the RIP sweep, and random quadruples in the BDP estimate
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub n: usize,
    pub r: usize,
    pub delta: f64,
    pub mu: f64,
    pub gap: f64,
    pub sweep: RipSweep,
    pub kappa_empirical: f64,
    /// (λ_max, condition at the chosen λ) for the n = 4, r = 1 blend
    pub lambda_region: Option<(f64, Option<(f64, f64, bool)>)>,
    pub lambda: Option<f64>,
    pub kappa_blend: Option<f64>,
}

impl fmt::Display for ExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, r = {}", self.n, self.r)?;
        writeln!(f, "delta = {:.6}", self.delta)?;
        writeln!(f, "mu = {}", self.mu)?;
        writeln!(f, "gap |[Q - Q'](K,L)|/(|K||L|) = {:.6}", self.gap)?;
        writeln!(
            f,
            "RIP sweep: ratio in [{:.6}, {:.6}] over {} evaluations; allowed [{:.6}, {:.6}]",
            self.sweep.min_ratio,
            self.sweep.max_ratio,
            self.sweep.evaluations,
            1.0 - self.delta - self.mu,
            1.0 + self.delta + self.mu
        )?;
        writeln!(f, "empirical BDP constant (lower bound) = {:.6}", self.kappa_empirical)?;
        writeln!(f, "4*delta + 2*mu = {:.6}", 4.0 * self.delta + 2.0 * self.mu)?;
        if let Some((lmax, cond)) = self.lambda_region {
            writeln!(f, "blend feasible for lambda < {lmax:.6}")?;
            if let (Some(l), Some((lhs, rhs, ok))) = (self.lambda, cond) {
                writeln!(f, "lambda = {l}: delta + mu = {lhs:.6} vs threshold {rhs:.6} -> {}", if ok { "holds" } else { "fails" })?;
            }
        }
        if let (Some(l), Some(k)) = (self.lambda, self.kappa_blend) {
            writeln!(f, "blend at lambda = {l}: empirical BDP constant = {k:.6}")?;
        }
        Ok(())
    }
}

const BASE_POINTS: usize = 50;

/// Base points spread over ln‖V‖² from well inside the bump's flat region to
/// past the calibrated point, plus V = 0 and the calibrated point itself.
pub fn sweep_points(ext: &BumpExtension, rank: usize, rng: &mut SampleRng) -> Vec<ScaledPoint> {
    let n = ext.n();
    let hi = 2.0 * ext.ln_s + 10.0;
    let lo = -10.0;
    let mut pts = vec![ScaledPoint::zero(n), ext.calibrated_point()];
    for k in 0..BASE_POINTS {
        let ln = lo + (hi - lo) * k as f64 / (BASE_POINTS - 1) as f64;
        pts.push(ScaledPoint {
            direction: unit_low_rank_psd(rng, n, rank),
            ln_norm_sq: ln,
        });
    }
    pts
}

pub fn run_example(opts: &ExampleOptions) -> Result<ExampleReport> {
    let pair = bdp_gap_pair(opts.n, opts.r)?;
    let delta = tight_delta(opts.n, opts.r);
    let ext = calibrate_extension(&pair.q, &pair.q_prime, opts.mu)?;
    let mut rng = rng_from_seed(opts.seed);
    let pts = sweep_points(&ext, opts.r, &mut rng);
    let per_point = opts.samples.div_ceil(pts.len()).max(1);
    let hess = |v: &ScaledPoint| extension_hessian(v, &ext);
    let sweep = rip_sweep(hess, opts.n, 2 * opts.r, &pts, per_point, &mut rng);
    let probe = BdpProbe {
        m: ext.calibrated_point(),
        m_prime: ScaledPoint::zero(opts.n),
        k: pair.k.clone(),
        l: pair.l.clone(),
    };
    let base = BasePointSampler {
        rank: opts.r,
        ln_norm_sq: (-10.0, 2.0 * ext.ln_s + 10.0),
    };
    let kappa_empirical = estimate_bdp(hess, opts.n, opts.r, opts.samples, base, &[probe.clone()], &mut rng);
    let kappa_blend = match opts.lambda {
        Some(l) => {
            // validates λ before the estimate
            blend_hessian(&ScaledPoint::zero(opts.n), l, &ext)?;
            Some(estimate_bdp(
                |v| blend_hessian(v, l, &ext).expect("lambda checked"),
                opts.n,
                opts.r,
                opts.samples,
                base,
                &[probe],
                &mut rng,
            ))
        }
        None => None,
    };
    let lambda_region =
        (opts.n == 4 && opts.r == 1).then(|| (blend_lambda_max(opts.mu), opts.lambda.map(|l| blend_condition(l, opts.mu))));
    Ok(ExampleReport {
        n: opts.n,
        r: opts.r,
        delta,
        mu: opts.mu,
        gap: pair.gap,
        sweep,
        kappa_empirical,
        lambda_region,
        lambda: opts.lambda,
        kappa_blend,
    })
}
