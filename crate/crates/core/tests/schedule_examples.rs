use rug::Rational;
use transfinite::exact::parse_rational;
use transfinite::ordinal::{nth_below, Ordinal};
use transfinite::pointset::{Arc, Card};
use transfinite::schedule::{
    build_finite_schedule, build_limit_schedule, build_sector_schedule, convergence_exponent_check, sector_ring,
    RadiiSequence,
};

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn host() -> Arc {
    Arc::new(q("1/8"), q("1/32")).unwrap()
}

#[test]
fn radii_prefix_and_product_law() {
    let r = RadiiSequence::fibonacci(12).unwrap();
    let logs: Vec<Rational> = (1..=5).map(|n| r.log_radius(n)).collect();
    assert_eq!(logs, [1, 2, 3, 5, 8].map(Rational::from));
    assert_eq!(r.log_radius(7), (r.log_radius(6) + r.log_radius(5)));
    assert_eq!(r.growth_threshold(256), r.growth_threshold(200));
}

#[test]
fn rows_carry_the_row_index_many_zeros() {
    let s = build_finite_schedule(&Ordinal::finite(3), 2, &host(), 10).unwrap();
    assert_eq!(s.row_count(5), 5);
    let mut last = Rational::new();
    for (l, z) in s.zeros().iter().enumerate() {
        assert!(z.log_r >= last, "log-radius drops at l = {}", l + 1);
        last = z.log_r.clone();
    }
    // every angle comes from the declared source
    let src = &s.sources()[0].set;
    assert!(s.zeros().iter().all(|z| src.contains(&z.turn)));
}

#[test]
fn sector_layout_examples() {
    assert_eq!(sector_ring(2, 2), 3);
    assert_eq!(sector_ring(3, 3), 6);
    let s = build_sector_schedule(&Ordinal::finite(3), 5).unwrap();
    for ring in s.rings().iter().filter(|r| r.row >= 3) {
        assert!(ring.zeros.len() < ring.row);
    }
    assert_eq!(
        s.source(3).unwrap().set.derive(&Ordinal::finite(2)).cardinality(),
        Card::Finite(3)
    );
}

#[test]
fn limit_layout_examples() {
    let s = build_limit_schedule(&Ordinal::omega(), 5).unwrap();
    for t in 1..=5 {
        let beta = Ordinal::finite(t as u64 - 1);
        assert_eq!(s.source(t).unwrap().set.derive(&beta).cardinality(), Card::Finite(1));
    }
    // the sector whose β is ω+1 hosts a set of rank ω+2
    let w2: Ordinal = "w*2".parse().unwrap();
    let target: Ordinal = "w+1".parse().unwrap();
    let t = (0..64).find(|&i| nth_below(&w2, i) == Some(target.clone())).unwrap() + 1;
    let s = build_limit_schedule(&w2, t).unwrap();
    let set = &s.source(t).unwrap().set;
    assert_eq!(set.derive(&target).cardinality(), Card::Finite(1));
    assert!(set.derive(&"w+2".parse().unwrap()).is_empty());
}

#[test]
fn convergence_examples() {
    let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).unwrap();
    let one = convergence_exponent_check(&s, &Rational::from(1), 10, 200);
    // Σ_{n>10} n 2^-n = 12/1024
    assert!(one.tail_bound < 12.0 / 1024.0);
    assert!(one.tail_bound <= one.coarse_tail_bound);
    let small = convergence_exponent_check(&s, &q("1/100"), 20, 200);
    assert!(small.tail_bound < 1e-6);
    assert!(small.partial_sum_lo.is_finite() && small.partial_sum_lo <= small.partial_sum_hi);
}
