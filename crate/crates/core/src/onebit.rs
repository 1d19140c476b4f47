//! 1-bit matrix completion with the sigmoid link: observation simulation,
//! the negative log-likelihood, and the radius around M* on which no
//! spurious local minimum can exist.
//!
//! The Hessian does not depend on the observed frequencies y, so none of
//! the certified constants do either. `simulate_observations` only exists
//! for end-to-end runs.

use std::f64::consts::SQRT_2;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::certify::{global_threshold, EPSILON_MAX};
use crate::constructions::QuadraticForm;
use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_sym, DenseMatrix};

pub fn sigma(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// σ′(x) = e^x/(1+e^x)², written in terms of e^{−|x|} so it never overflows.
pub fn sigma_prime(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// log(1 + e^x)
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Relative tolerance for the rank check on M*.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OneBitInstance {
    pub mstar: DenseMatrix,
    pub r: usize,
    pub y: Option<DenseMatrix>,
}

impl OneBitInstance {
    pub fn new(mstar: DenseMatrix, r: usize, y: Option<DenseMatrix>) -> Result<Self> {
        if !mstar.is_square() {
            return Err(Error::Dimension(format!("M* is {}x{}", mstar.rows(), mstar.cols())));
        }
        if r == 0 {
            return Err(Error::Range("r must be positive".into()));
        }
        let scale = mstar.max_abs().max(1.0);
        if !mstar.is_symmetric(1e-12 * scale) {
            return Err(Error::NotSymmetric(mstar.asymmetry()));
        }
        let eig = eigenvalues_sym(&mstar);
        let l1 = eig.first().copied().unwrap_or(0.0).abs();
        let tol = RANK_TOL * l1.max(f64::MIN_POSITIVE);
        if let Some(&lmin) = eig.last() {
            if lmin < -tol {
                return Err(Error::Range(format!("M* has negative eigenvalue {lmin:e}")));
            }
        }
        if eig.iter().skip(r).any(|v| v.abs() > tol) {
            return Err(Error::Range(format!("M* has rank greater than {r}")));
        }
        if let Some(y) = &y {
            if y.shape() != mstar.shape() {
                return Err(Error::Dimension("y must have the shape of M*".into()));
            }
            if y.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Range("y entries must lie in [0, 1]".into()));
            }
        }
        Ok(Self { mstar, r, y })
    }

    pub fn n(&self) -> usize {
        self.mstar.rows()
    }
}

/// Frequencies of ones among `count` Bernoulli(σ(M*ᵢⱼ)) draws per entry.
pub fn simulate_observations<R: Rng + ?Sized>(mstar: &DenseMatrix, count: u64, rng: &mut R) -> Result<DenseMatrix> {
    if count == 0 {
        return Err(Error::Range("count per entry must be at least 1".into()));
    }
    let mut out = DenseMatrix::zeros(mstar.rows(), mstar.cols());
    for (o, m) in out.as_mut_slice().iter_mut().zip(mstar.as_slice()) {
        let b = Binomial::new(count, sigma(*m)).map_err(|e| Error::Range(e.to_string()))?;
        *o = b.sample(rng) as f64 / count as f64;
    }
    Ok(out)
}

/// f(M) = Σ log(1 + e^{Mᵢⱼ}) − yᵢⱼMᵢⱼ
pub fn loglik(m: &DenseMatrix, y: &DenseMatrix) -> f64 {
    m.as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(m, y)| softplus(*m) - y * m)
        .sum()
}

pub fn loglik_gradient(m: &DenseMatrix, y: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| sigma(m[(i, j)]) - y[(i, j)])
}

/// [∇²f(M)](K,L) = Σ σ′(Mᵢⱼ)KᵢⱼLᵢⱼ
pub fn loglik_hessian(m: &DenseMatrix) -> QuadraticForm {
    let w = DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| sigma_prime(m[(i, j)]));
    QuadraticForm::entry_wise(w).expect("weights are square when M is")
}

/// Curvature constants of f on the Frobenius ball of radius R around M*.
/// The envelopes hold for every K, L, so they are valid for any rank budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusCertificate {
    pub radius: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub gamma_scale: f64,
    pub delta: f64,
    /// γm₃, only reported for r = 1
    pub kappa: Option<f64>,
    pub lambda_r: f64,
}

impl RadiusCertificate {
    /// (δ, √(1 − ((3+2√2)/4)(R/λ_r)²)); the radius is certified when the
    /// first is strictly smaller.
    pub fn bound_sides(&self) -> (f64, f64) {
        (self.delta, local_rhs(self.radius, self.lambda_r))
    }

    pub fn local_certifies(&self) -> bool {
        self.lambda_r > 0.0 && self.radius <= EPSILON_MAX * self.lambda_r && {
            let (l, r) = self.bound_sides();
            l < r
        }
    }

    /// For r = 1: whether δ lies below the global threshold at κ = γm₃.
    pub fn global_certifies(&self) -> Option<bool> {
        self.kappa
            .map(|k| global_threshold(k).map(|t| self.delta < t).unwrap_or(false))
    }
}

fn local_rhs(radius: f64, lambda_r: f64) -> f64 {
    let eps = radius / lambda_r;
    (1.0 - (3.0 + 2.0 * SQRT_2) / 4.0 * eps * eps).max(0.0).sqrt()
}

/// λ_r(M*), the r-th largest eigenvalue, clipped at 0.
pub fn lambda_r(mstar: &DenseMatrix, r: usize) -> f64 {
    eigenvalues_sym(mstar).get(r.wrapping_sub(1)).copied().unwrap_or(0.0).max(0.0)
}

pub fn local_constants(mstar: &DenseMatrix, radius: f64, r: usize) -> Result<RadiusCertificate> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Range(format!("R must be nonnegative, got {radius}")));
    }
    if mstar.rows() == 0 {
        return Err(Error::Dimension("M* is empty".into()));
    }
    let lo = |v: f64| (v.abs() - radius).max(0.0);
    let hi = |v: f64| v.abs() + radius;
    let entries = mstar.as_slice();
    let min_lo = entries.iter().map(|v| lo(*v)).fold(f64::INFINITY, f64::min);
    let max_hi = entries.iter().map(|v| hi(*v)).fold(0.0, f64::max);
    let m1 = sigma_prime(min_lo);
    let m2 = sigma_prime(max_hi);
    let m3 = entries
        .iter()
        .map(|v| sigma_prime(lo(*v)) - sigma_prime(hi(*v)))
        .fold(0.0, f64::max);
    let gamma_scale = 2.0 / (m1 + m2);
    Ok(RadiusCertificate {
        radius,
        m1,
        m2,
        m3,
        gamma_scale,
        delta: (m1 - m2) / (m1 + m2),
        kappa: (r == 1).then_some(gamma_scale * m3),
        lambda_r: lambda_r(mstar, r),
    })
}

pub const RADIUS_TOL: f64 = 1e-4;

/// The largest R (to within `RADIUS_TOL`) for which the local bound holds.
/// The bracket grows from 2⁻²⁰λ_r by doubling until the bound fails or the
/// cap 2(√2−1)λ_r is reached, then bisects.
pub fn certified_radius(mstar: &DenseMatrix, r: usize) -> Result<RadiusCertificate> {
    let lr = lambda_r(mstar, r);
    if !(lr > 0.0) {
        return Err(Error::RankDeficient(format!("λ_{r}(M*) = 0; no local guarantee")));
    }
    let cap = EPSILON_MAX * lr;
    let holds = |radius: f64| -> Result<bool> { Ok(local_constants(mstar, radius, r)?.local_certifies()) };
    if !holds(0.0)? {
        return local_constants(mstar, 0.0, r);
    }
    let mut lo = 0.0;
    let mut hi = lr * 2f64.powi(-20);
    loop {
        if hi >= cap {
            hi = cap;
            if holds(cap)? {
                return local_constants(mstar, cap, r);
            }
            break;
        }
        if !holds(hi)? {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > RADIUS_TOL {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    local_constants(mstar, lo, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    fn diag22(n: usize) -> DenseMatrix {
        let mut d = vec![0.0; n];
        d[0] = 2.0;
        d[1] = 2.0;
        DenseMatrix::from_diag(&d)
    }

    #[test]
    fn sigmoid_pieces() {
        assert_eq!(sigma(0.0), 0.5);
        assert_eq!(sigma_prime(0.0), 0.25);
        let e2 = 2f64.exp();
        assert!((sigma_prime(2.0) - e2 / (1.0 + e2).powi(2)).abs() < 1e-16);
        assert!(sigma_prime(800.0) >= 0.0 && sigma_prime(-800.0).is_finite());
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-12);
        assert!((softplus(0.3) - (1.0 + 0.3f64.exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn simulate_is_seeded() {
        let m = DenseMatrix::from_fn(3, 3, |_, _| 2.0);
        let a = simulate_observations(&m, 10_000, &mut rng_from_seed(5)).unwrap();
        let b = simulate_observations(&m, 10_000, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a, b);
        let p = sigma(2.0);
        let se = (p * (1.0 - p) / 1e4).sqrt();
        assert!(a.as_slice().iter().all(|v| (v - p).abs() < 4.0 * se));
        assert!(simulate_observations(&m, 0, &mut rng_from_seed(5)).is_err());
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mut rng = rng_from_seed(11);
        let m = crate::sampling::normal_matrix(&mut rng, 3, 3);
        let y = DenseMatrix::from_fn(3, 3, |i, j| ((i + 2 * j) % 3) as f64 / 2.0);
        let k = crate::sampling::normal_matrix(&mut rng, 3, 3);
        let h = 1e-4;
        let fd = (loglik(&m.add(&k.scale(h)), &y) - 2.0 * loglik(&m, &y) + loglik(&m.sub(&k.scale(h)), &y)) / (h * h);
        let exact = loglik_hessian(&m).quad(&k);
        assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "{fd} vs {exact}");
        let g = loglik_gradient(&m, &y);
        let fd1 = (loglik(&m.add(&k.scale(h)), &y) - loglik(&m.sub(&k.scale(h)), &y)) / (2.0 * h);
        assert!((fd1 - g.inner(&k)).abs() < 1e-6);
    }

    #[test]
    fn constants_at_zero_radius() {
        let c = local_constants(&diag22(4), 0.0, 2).unwrap();
        let expect = (0.25 - sigma_prime(2.0)) / (0.25 + sigma_prime(2.0));
        assert!((c.delta - expect).abs() < 1e-15);
        assert!((c.delta - 0.41).abs() < 5e-3);
        assert!(c.kappa.is_none());
        let z = local_constants(&DenseMatrix::zeros(3, 3), 0.0, 1).unwrap();
        assert_eq!((z.m1, z.m2, z.delta, z.gamma_scale), (0.25, 0.25, 0.0, 4.0));
        assert_eq!(z.kappa, Some(0.0));
    }

    #[test]
    fn radius_for_diag_example() {
        let c = certified_radius(&diag22(4), 2).unwrap();
        assert!((1.13..=1.15).contains(&c.radius), "{}", c.radius);
        let below = local_constants(&diag22(4), c.radius - 1e-3, 2).unwrap();
        let above = local_constants(&diag22(4), c.radius + 1e-3, 2).unwrap();
        assert!(below.local_certifies());
        assert!(!above.local_certifies());
    }

    #[test]
    fn rank_deficient_has_no_radius() {
        assert!(matches!(
            certified_radius(&DenseMatrix::zeros(4, 4), 1),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn instance_validation() {
        assert!(OneBitInstance::new(diag22(4), 2, None).is_ok());
        assert!(OneBitInstance::new(diag22(4), 1, None).is_err());
        let bad_y = DenseMatrix::from_fn(4, 4, |_, _| 1.5);
        assert!(OneBitInstance::new(diag22(4), 2, Some(bad_y)).is_err());
    }
}
