mod common;

use common::*;
use proptest::prelude::*;

fn entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 1usize..=n.min(3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vec_is_adjoint_to_inner_product((a, b) in (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| (entries(r * c).prop_map(move |v| mat_from(r, c, &v)), entries(r * c).prop_map(move |v| mat_from(r, c, &v))))) {
        prop_assert!(vec_adjoint(&a, &b).is_ok(), "{:?}", vec_adjoint(&a, &b));
    }

    #[test]
    fn x_operator_matches_definition(((n, r), xs, us) in dims().prop_flat_map(|(n, r)| (Just((n, r)), entries(n * r), entries(n * r)))) {
        let x = mat_from(n, r, &xs);
        let u = mat_from(n, r, &us);
        let res = x_operator_action(&x, &u);
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn rank1_norm(xu in (2usize..=6).prop_flat_map(|n| (entries(n), entries(n)))) {
        let res = rank1_norm_identity(&xu.0, &xu.1);
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn eigangle_spectrum(uv in (2usize..=6).prop_flat_map(|n| (entries(n), entries(n)))) {
        let res = eigangle(&uv.0, &uv.1);
        prop_assert!(res.is_ok(), "{:?}", res);
    }

    #[test]
    fn psd_split_clamps(m in (1usize..=6).prop_flat_map(|n| entries(n * n).prop_map(move |v| mat_from(n, n, &v)))) {
        let res = psd_split_reconstructs(&m);
        prop_assert!(res.is_ok(), "{:?}", res);
    }
}
