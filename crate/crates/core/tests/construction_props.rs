mod common;

use common::*;
use proptest::prelude::*;
use rankcert::constructions::{bdp_gap_pair, calibrate_extension};
use rankcert::matrix::DenseMatrix;

fn entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

fn signs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1.0 } else { -1.0 }), n)
}

/// Σ uᵢvᵢᵀ over `k` factor pairs.
fn low_rank(n: usize, k: usize, data: &[f64]) -> DenseMatrix {
    let u = mat_from(n, k, &data[..n * k]);
    let v = mat_from(n, k, &data[n * k..2 * n * k]);
    u.matmul(&v.transpose())
}

#[test]
fn bases_are_orthonormal() {
    for n in 4..=6 {
        basis_orthonormal(&vec![1.0; n]).unwrap();
    }
    basis_orthonormal(&[1.0, 1.0, -1.0, -1.0]).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_splits_across_a1((s, m) in (4usize..=6).prop_flat_map(|n| (signs(n), entries(n * n).prop_map(move |v| mat_from(n, n, &v))))) {
        let res = operator_energy(&s, &m);
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn trace_of_low_rank_is_small((n, r, s, data) in (4usize..=8).prop_flat_map(|n| (Just(n), 1usize..=((n - 1) / 2))).prop_flat_map(|(n, r)| (Just(n), Just(r), signs(n), entries(4 * n * r)))) {
        let m = low_rank(n, 2 * r, &data);
        let res = trace_bound(&s, &m, r);
        prop_assert!(res.is_ok(), "{:?}", res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_hessian_matches_finite_differences(vs in entries(16), ks in entries(16), scale in -1.5f64..2.5, mu in prop::sample::select(vec![0.01, 0.5, 2.0])) {
        let p = bdp_gap_pair(4, 1).unwrap();
        let ext = calibrate_extension(&p.q, &p.q_prime, mu).unwrap();
        let v = mat_from(4, 4, &vs);
        let nv = v.frobenius_norm();
        prop_assume!(nv > 1e-3);
        let v = v.scale(10f64.powf(scale) / nv);
        let k = mat_from(4, 4, &ks);
        prop_assume!(k.frobenius_norm() > 1e-3);
        let k = k.scale(1.0 / k.frobenius_norm());
        let res = extension_fd(&ext, &v, &k);
        prop_assert!(res.is_ok(), "{:?}", res);
    }
}
