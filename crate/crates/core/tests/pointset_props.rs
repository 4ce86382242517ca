use proptest::prelude::*;
use rug::Rational;
use transfinite::ordinal::Ordinal;
use transfinite::pointset::{build_rank_set, union_disjoint, Arc, Card, RankTree};

const ALPHAS: [&str; 8] = ["1", "2", "3", "5", "w", "w+2", "w*2+1", "w^2"];

fn host() -> impl Strategy<Value = Arc> {
    (0i64..64, 40u64..200).prop_map(|(c, w)| Arc::new(Rational::from((c, 64)), Rational::from((1, w))).unwrap())
}

fn set() -> impl Strategy<Value = (Ordinal, u64, Arc, RankTree)> {
    (0..ALPHAS.len(), 1u64..4, host()).prop_map(|(i, nu, h)| {
        let alpha: Ordinal = ALPHAS[i].parse().unwrap();
        let nu = if alpha.is_successor() { nu } else { 1 };
        let e = build_rank_set(&alpha, nu, &h).unwrap();
        (alpha, nu, h, e)
    })
}

// from stage 1 on: the sets themselves are not closed, E and E^(1) are disjoint
fn stages(alpha: &Ordinal) -> Vec<Ordinal> {
    let mut v: Vec<Ordinal> = (1..6).map(Ordinal::finite).collect();
    for s in ["w", "w+1", "w*2", "w^2"] {
        v.push(s.parse().unwrap());
    }
    v.retain(|b| b <= alpha);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derive_matches_iterated_single_steps((_, _, _, e) in set(), k in 1u64..=6) {
        let mut step = e.clone();
        for _ in 0..k {
            step = step.derive_once();
        }
        prop_assert_eq!(step, e.derive(&Ordinal::finite(k)));
    }

    #[test]
    fn rank_is_exact((alpha, nu, _, e) in set()) {
        match alpha.predecessor().unwrap() {
            Some(p) => {
                prop_assert_eq!(e.derive(&p).cardinality(), Card::Finite(nu));
                prop_assert!(e.derive(&alpha).is_empty());
            }
            None => prop_assert_eq!(e.derive(&alpha).cardinality(), Card::Finite(1)),
        }
    }

    #[test]
    fn leaves_are_isolated((_, _, _, e) in set()) {
        let limits = e.derive_once();
        for p in e.materialize(3, 3) {
            prop_assert!(!limits.contains(&p), "{} is both isolated and a limit", p);
        }
    }

    #[test]
    fn derived_sets_shrink((alpha, _, _, e) in set()) {
        let st = stages(&alpha);
        for (i, a) in st.iter().enumerate() {
            let big = e.derive(a);
            for b in &st[i + 1..] {
                for p in e.derive(b).materialize(2, 3) {
                    prop_assert!(big.contains(&p), "{} in stage {} but not {}", p, b, a);
                }
            }
        }
    }

    #[test]
    fn points_stay_in_host((_, _, h, e) in set()) {
        for p in e.materialize(3, 4) {
            prop_assert!(h.contains(&p));
            prop_assert!(e.contains(&p));
        }
    }

    #[test]
    fn json_round_trip((_, _, _, e) in set(), k in 0u64..3) {
        let d = e.derive(&Ordinal::finite(k));
        let back: RankTree = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn union_commutes_with_derive(i in 0..ALPHAS.len(), j in 0..ALPHAS.len(), k in 0u64..4) {
        let a_arc = Arc::new(Rational::from((1, 8)), Rational::from((1, 40))).unwrap();
        let b_arc = Arc::new(Rational::from((5, 8)), Rational::from((1, 40))).unwrap();
        let a = build_rank_set(&ALPHAS[i].parse().unwrap(), 1, &a_arc).unwrap();
        let b = build_rank_set(&ALPHAS[j].parse().unwrap(), 1, &b_arc).unwrap();
        let u = union_disjoint(vec![(a.clone(), a_arc.clone()), (b.clone(), b_arc.clone())]).unwrap();
        let beta = Ordinal::finite(k);
        let split = union_disjoint(vec![(a.derive(&beta), a_arc), (b.derive(&beta), b_arc)]).unwrap();
        prop_assert_eq!(u.derive(&beta), split);
    }
}

#[test]
fn overlapping_arcs_are_rejected() {
    let a = Arc::new(Rational::from((1, 8)), Rational::from((1, 16))).unwrap();
    let b = Arc::new(Rational::from((3, 16)), Rational::from((1, 16))).unwrap();
    let e = build_rank_set(&Ordinal::finite(2), 1, &a).unwrap();
    let f = build_rank_set(&Ordinal::finite(2), 1, &b).unwrap();
    assert!(union_disjoint(vec![(e, a), (f, b)]).is_err());
}
