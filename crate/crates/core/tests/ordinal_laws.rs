use ordtree::generate;
use ordtree::Ordinal;
use proptest::prelude::*;
use std::cmp::Ordering;

fn triple(seed: u64) -> (Ordinal, Ordinal, Ordinal) {
    let mut r = generate::rng(seed);
    (generate::ordinal(&mut r), generate::ordinal(&mut r), generate::ordinal(&mut r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn addition_is_associative(seed in any::<u64>()) {
        let (a, b, c) = triple(seed);
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn zero_is_neutral(seed in any::<u64>()) {
        let (a, _, _) = triple(seed);
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a);
    }

    #[test]
    fn order_is_total_and_transitive(seed in any::<u64>()) {
        let (a, b, c) = triple(seed);
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a == b, a.cmp(&b) == Ordering::Equal);
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn addition_is_strictly_monotone_on_the_right(seed in any::<u64>()) {
        let (a, b, c) = triple(seed);
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
        }
        prop_assert!(a.add(&b) >= b);
        prop_assert!(a.add(&b) >= a);
    }

    #[test]
    fn left_subtraction_round_trips(seed in any::<u64>()) {
        let (a, b, _) = triple(seed);
        prop_assert_eq!(Ordinal::left_subtract(&a, &a.add(&b)).unwrap(), b.clone());
        let (lo, hi) = if a <= b { (&a, &b) } else { (&b, &a) };
        let d = Ordinal::left_subtract(lo, hi).unwrap();
        prop_assert_eq!(lo.add(&d), hi.clone());
        if lo < hi {
            prop_assert!(Ordinal::left_subtract(hi, lo).is_err());
        }
    }

    #[test]
    fn omega_times_distributes_on_the_left(seed in any::<u64>()) {
        let (a, b, _) = triple(seed);
        prop_assert_eq!(a.add(&b).omega_times(), a.omega_times().add(&b.omega_times()));
    }

    #[test]
    fn successors_and_predecessors(seed in any::<u64>()) {
        let (a, _, _) = triple(seed);
        let s = a.succ();
        prop_assert!(s > a);
        prop_assert!(s.is_successor());
        prop_assert_eq!(s.pred(), Some(a.clone()));
        prop_assert_eq!(a.is_limit(), !a.is_zero() && !a.is_successor());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let (a, _, _) = triple(seed);
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&s).unwrap(), a);
    }
}

#[test]
fn enumeration_below_is_increasing_by_norm() {
    let bound = Ordinal::omega_pow(Ordinal::from(2));
    let list = Ordinal::enumerate_below(&bound, 200);
    assert_eq!(list.len(), 200);
    assert!(list.iter().all(|x| *x < bound));
    for w in list.windows(2) {
        assert!((w[0].norm(), &w[0]) < (w[1].norm(), &w[1]));
    }
}
