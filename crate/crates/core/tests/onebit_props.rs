mod common;

use common::*;
use proptest::prelude::*;
use rankcert::certify::EPSILON_MAX;
use rankcert::onebit::{certified_radius, lambda_r, local_constants};

fn entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

const N: usize = 4;

fn psd_rank1(z: &[f64]) -> rankcert::matrix::DenseMatrix {
    let zm = mat_from(N, 1, z);
    zm.matmul(&zm.transpose())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn curvature_within_envelope(z in entries(N), d in entries(N * N), k in entries(N * N), frac in 0.0f64..1.0, radius in 0.0f64..3.0) {
        let mstar = psd_rank1(&z);
        let m = in_ball(&mstar, &mat_from(N, N, &d), frac, radius);
        let res = curvature_envelope(&mstar, radius, &m, &mat_from(N, N, &k));
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn hessian_differences_within_bdp_envelope(
        z in entries(N), d1 in entries(N * N), d2 in entries(N * N),
        k in entries(N * N), l in entries(N * N),
        f1 in 0.0f64..1.0, f2 in 0.0f64..1.0, radius in 0.0f64..3.0,
    ) {
        let mstar = psd_rank1(&z);
        let m = in_ball(&mstar, &mat_from(N, N, &d1), f1, radius);
        let mp = in_ball(&mstar, &mat_from(N, N, &d2), f2, radius);
        let res = bdp_envelope(&mstar, radius, &m, &mp, &mat_from(N, N, &k), &mat_from(N, N, &l));
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn scaled_midpoint_is_one(z in entries(2 * N), radius in 0.0f64..3.0) {
        let zm = mat_from(N, 2, &z);
        let res = scaling_midpoint(&zm.matmul(&zm.transpose()), radius);
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn delta_nondecreasing_in_radius(z in entries(2 * N), r1 in 0.0f64..2.0, dr in 0.0f64..1.0) {
        let zm = mat_from(N, 2, &z);
        let m = zm.matmul(&zm.transpose());
        let a = local_constants(&m, r1, 2).unwrap();
        let b = local_constants(&m, r1 + dr, 2).unwrap();
        prop_assert!(b.delta >= a.delta);
    }

    #[test]
    fn certified_radius_in_domain(z in entries(2 * N)) {
        let zm = mat_from(N, 2, &z);
        let m = zm.matmul(&zm.transpose());
        prop_assume!(lambda_r(&m, 2) > 1e-6);
        let c = certified_radius(&m, 2).unwrap();
        prop_assert!(c.radius >= 0.0 && c.radius <= EPSILON_MAX * c.lambda_r + 1e-12);
    }
}

#[test]
fn sigma_prime_is_even_on_grid() {
    for k in -4000..=4000 {
        sigma_prime_even(k as f64 * 0.01).unwrap();
    }
    sigma_prime_even(750.0).unwrap();
}
