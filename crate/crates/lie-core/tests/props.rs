//! Property tests for the exact-arithmetic layer.

use lie_core::rat::{rat, Rat};
use lie_core::subspace::Subspace;
use lie_core::tensor::{heisenberg, n522};
use proptest::prelude::*;

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<Rat>> {
    proptest::collection::vec(rat_strategy(), dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Random spanning sets of the same subspace canonicalize identically:
    // adding any linear combination of the rows never changes the value.
    #[test]
    fn canonical_form_is_spanning_set_independent(
        rows in proptest::collection::vec(vec_strategy(4), 1..4),
        coeffs in proptest::collection::vec(rat_strategy(), 4),
    ) {
        let s = Subspace::span(4, &rows).unwrap();
        let mut extra = lie_core::rat::vzero(4);
        for (c, row) in coeffs.iter().zip(&rows) {
            lie_core::rat::vaxpy(&mut extra, c, row);
        }
        let mut rows2 = rows.clone();
        rows2.push(extra);
        rows2.reverse();
        let s2 = Subspace::span(4, &rows2).unwrap();
        prop_assert_eq!(s, s2);
    }

    #[test]
    fn bracket_is_bilinear_antisymmetric(
        x in vec_strategy(5),
        y in vec_strategy(5),
        c in rat_strategy(),
    ) {
        let t = n522();
        let xy = t.bracket(&x, &y).unwrap();
        let yx = t.bracket(&y, &x).unwrap();
        prop_assert_eq!(&lie_core::rat::vneg(&yx), &xy);
        let cx: Vec<Rat> = x.iter().map(|v| &c * v).collect();
        let scaled = t.bracket(&cx, &y).unwrap();
        let expected: Vec<Rat> = xy.iter().map(|v| &c * v).collect();
        prop_assert_eq!(scaled, expected);
    }

    #[test]
    fn span_bracket_symmetric(
        a in proptest::collection::vec(vec_strategy(5), 1..3),
        b in proptest::collection::vec(vec_strategy(5), 1..3),
    ) {
        let t = n522();
        let sa = Subspace::span(5, &a).unwrap();
        let sb = Subspace::span(5, &b).unwrap();
        prop_assert_eq!(
            t.subspace_bracket(&sa, &sb).unwrap(),
            t.subspace_bracket(&sb, &sa).unwrap()
        );
    }

    #[test]
    fn dilation_composition(
        x in vec_strategy(3),
        e in rat_strategy(),
        tau in rat_strategy(),
    ) {
        let t = heisenberg();
        let g = lie_core::grading::build_asymptotic_grading(&t, None).unwrap();
        let lhs = g.dilate(&e, &g.dilate(&tau, &x));
        let rhs = g.dilate(&(e * tau), &x);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(g.dilate(&lie_core::rat::rint(1), &x), x);
    }

    #[test]
    fn dynkin_group_laws(
        x in vec_strategy(5),
        y in vec_strategy(5),
    ) {
        let t = n522();
        let zero = lie_core::rat::vzero(5);
        let p = lie_core::bch::dynkin_product(&t, &x, &y).unwrap();
        prop_assert_eq!(lie_core::bch::dynkin_product(&t, &zero, &x).unwrap(), x.clone());
        prop_assert_eq!(lie_core::bch::dynkin_product(&t, &x, &zero).unwrap(), x.clone());
        let inv = lie_core::rat::vneg(&x);
        let back = lie_core::bch::dynkin_product(&t, &inv, &p).unwrap();
        prop_assert_eq!(back, y);
    }
}
