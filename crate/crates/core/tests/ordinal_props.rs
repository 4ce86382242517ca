use std::cmp::Ordering;

use proptest::prelude::*;
use transfinite::ordinal::{compare, enumerate_below, Ordinal};

fn exponent() -> impl Strategy<Value = Ordinal> {
    prop_oneof![
        Just(Ordinal::zero()),
        (1u64..4).prop_map(Ordinal::finite),
        Just(Ordinal::omega()),
        Just("w+1".parse().unwrap()),
        Just("w*2".parse().unwrap()),
    ]
}

fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((exponent(), 0u64..4), 0..4).prop_map(Ordinal::from_terms)
}

fn nonzero() -> impl Strategy<Value = Ordinal> {
    ordinal().prop_filter("non-zero", |o| !o.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn compare_is_total_and_antisymmetric(a in ordinal(), b in ordinal()) {
        let ab = compare(&a, &b);
        prop_assert_eq!(ab, compare(&b, &a).reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
    }

    #[test]
    fn compare_is_transitive(a in ordinal(), b in ordinal(), c in ordinal()) {
        let mut v = [a, b, c];
        v.sort_by(compare);
        prop_assert_ne!(compare(&v[0], &v[2]), Ordering::Greater);
    }

    #[test]
    fn predecessor_is_immediate(a in nonzero()) {
        if let Some(p) = a.predecessor().unwrap() {
            prop_assert_eq!(compare(&p, &a), Ordering::Less);
            prop_assert_eq!(p.successor(), a.clone());
            for x in enumerate_below(&a, 200) {
                prop_assert!(!(x > p && x < a), "{} lies between {} and {}", x, p, a);
            }
        } else {
            prop_assert!(a.is_limit());
        }
    }

    #[test]
    fn fundamental_sequences_climb(a in nonzero(), n in 1u64..6) {
        prop_assume!(a.is_limit());
        let x = a.fundamental_sequence(n).unwrap();
        let y = a.fundamental_sequence(n + 1).unwrap();
        prop_assert!(x < y && y < a, "{} {} {}", x, y, a);
    }

    #[test]
    fn enumeration_is_distinct_and_below(a in nonzero()) {
        let xs = enumerate_below(&a, 60);
        for (i, x) in xs.iter().enumerate() {
            prop_assert!(*x < a);
            prop_assert!(!xs[..i].contains(x));
        }
        if let Some(n) = a.as_finite() {
            prop_assert_eq!(xs.len() as u64, n.min(60));
        }
    }

    #[test]
    fn display_round_trips(a in ordinal()) {
        let back: Ordinal = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn addition_is_monotone_on_the_right(a in ordinal(), b in ordinal(), c in ordinal()) {
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
        }
    }
}
