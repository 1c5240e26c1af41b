use ordtree::generate;
use ordtree::order_term::{enumerate_points, split_at_point, DEFAULT_REALIZE_CAP};
use ordtree::{
    brute_dp, canonical_colouring, character_at, compare_points, dp, finite_realize, is_scattered, OrderTerm,
    Ordinal, TermError,
};
use proptest::prelude::*;
use std::cmp::Ordering;

fn scattered(seed: u64) -> OrderTerm {
    generate::term(&mut generate::rng(seed), 3, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn normalization_is_idempotent_and_keeps_rank(seed in any::<u64>()) {
        let t = scattered(seed);
        let n = t.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert_eq!(dp(&n, None).unwrap(), dp(&t, None).unwrap());
    }

    #[test]
    fn reversal_keeps_rank(seed in any::<u64>()) {
        let t = scattered(seed);
        let r = OrderTerm::Rev(Box::new(t.clone()));
        prop_assert_eq!(dp(&r, None).unwrap(), dp(&t, None).unwrap());
        prop_assert_eq!(OrderTerm::rev(OrderTerm::rev(t.clone())), t.normalize());
    }

    #[test]
    fn dense_terms_are_detected(seed in any::<u64>()) {
        let t = generate::term(&mut generate::rng(seed), 3, true);
        prop_assert_eq!(is_scattered(&t), dp(&t, None).is_ok());
        if !is_scattered(&t) {
            prop_assert_eq!(dp(&t, None).unwrap_err(), TermError::NotScattered);
        }
    }

    #[test]
    fn finite_pieces_never_outrank_the_term(seed in any::<u64>(), n in 1usize..40) {
        let t = scattered(seed);
        let real = finite_realize(&t, n, DEFAULT_REALIZE_CAP).unwrap();
        for w in real.points.windows(2) {
            prop_assert_eq!(compare_points(&t, &w[0], &w[1]).unwrap(), Ordering::Less);
        }
        let brute = brute_dp(&real.order).unwrap();
        prop_assert!(Ordinal::from(brute) <= dp(&t, None).unwrap());
    }

    #[test]
    fn splitting_at_a_point_lowers_rank(seed in any::<u64>()) {
        let t = scattered(seed).normalize();
        let whole = dp(&t, None).unwrap();
        for p in enumerate_points(&t, 12) {
            let (l, r) = split_at_point(&t, &p).unwrap();
            prop_assert!(dp(&l, None).unwrap() <= whole);
            prop_assert!(dp(&r, None).unwrap() <= whole);
            if let Some(size) = t.finite_size() {
                prop_assert_eq!(l.finite_size().unwrap() + 1 + r.finite_size().unwrap(), size);
            }
        }
    }

    #[test]
    fn canonical_colouring_is_idempotent_and_names_characters(seed in any::<u64>()) {
        let t = scattered(seed);
        let c = canonical_colouring(&t);
        prop_assert_eq!(canonical_colouring(&c), c.clone());
        for p in enumerate_points(&c, 20) {
            let want = character_at(&c, &p).unwrap().index();
            prop_assert_eq!(ordtree::order_term::point_colour(&c, &p).unwrap(), Some(want));
        }
    }
}

#[test]
fn finite_ordinal_ranks() {
    for n in 1..=64u64 {
        let t = OrderTerm::finite(n);
        let real = finite_realize(&t, n as usize, DEFAULT_REALIZE_CAP).unwrap();
        let brute = brute_dp(&real.order).unwrap();
        assert_eq!(brute, 64 - n.leading_zeros() as u64);
        assert_eq!(dp(&t, None).unwrap(), Ordinal::from(brute));
    }
}

/// In `ω·3` no point splits the order into two parts of smaller rank.
#[test]
fn omega_times_three_has_no_balanced_point() {
    let t = OrderTerm::ord(Ordinal::term(Ordinal::one(), 3));
    let whole = dp(&t, None).unwrap();
    assert_eq!(whole, Ordinal::omega().succ());
    for p in enumerate_points(&t, 60) {
        let (l, r) = split_at_point(&t, &p).unwrap();
        let (dl, dr) = (dp(&l, None).unwrap(), dp(&r, None).unwrap());
        assert!(dl == whole || dr == whole, "{p:?}: {dl} {dr}");
    }
}
