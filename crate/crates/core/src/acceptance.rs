//! The acceptance suite: eleven end-to-end checks over every module, each
//! reduced to one pass/fail line with a short deterministic detail string.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use serde::Serialize;

use crate::evaluator::{default_precision, sector_bound_check, sector_lower_bound, LogPolar};
use crate::ordinal::{enumerate_below, Ordinal};
use crate::par::Strategy;
use crate::pointset::oracle::PruningOracle;
use crate::pointset::{build_rank_set, singleton_refine, union_disjoint, Arc, Card, RankTree};
use crate::probe::{
    classify, condition_m_sweep, min_log_modulus_on_circle, non_c0_certificate, order_report, Branch, DilationRule,
    ProbePoint, Status,
};
use crate::schedule::{
    build_finite_schedule, build_limit_schedule, build_sector_schedule, convergence_exponent_check, RadiiSequence,
    ZeroSchedule,
};

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "rank construction"),
    (2, "union law"),
    (3, "singleton refinement"),
    (4, "radii validity"),
    (5, "schedule counting"),
    (6, "sector divergence"),
    (7, "zero clustering"),
    (8, "immunity of geometric-mean dilations"),
    (9, "condition (M) surrogate"),
    (10, "sector schedules"),
    (11, "determinism"),
];

const SEED: u64 = 0x7ea5_1b1e;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.pass).count()
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out.push_str(&format!(
            "{} passed, {} failed\n",
            self.results.len() - self.failures(),
            self.failures()
        ));
        out
    }
}

/// Parses `all` or a comma-separated list of criterion ids.
pub fn parse_suite(s: &str) -> Result<Vec<u8>, String> {
    if s.trim() == "all" {
        return Ok(CRITERIA.iter().map(|(id, _)| *id).collect());
    }
    let mut ids = Vec::new();
    for part in s.split(',') {
        let id: u8 = part.trim().parse().map_err(|_| format!("unknown criterion {part:?}"))?;
        if !CRITERIA.iter().any(|(c, _)| *c == id) {
            return Err(format!("unknown criterion {id}"));
        }
        ids.push(id);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

type Outcome = Result<(bool, String), String>;

fn finish(id: u8, outcome: Outcome) -> CriterionResult {
    let name = CRITERIA[id as usize - 1].1.to_string();
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name, pass, detail }
}

pub fn run_criterion(id: u8, strategy: Strategy) -> CriterionResult {
    let outcome = match id {
        1 => rank_construction(),
        2 => union_law(),
        3 => singleton_refinement(),
        4 => radii_validity(),
        5 => schedule_counting(),
        6 => sector_divergence(),
        7 => zero_clustering(),
        8 => immunity(),
        9 => condition_m(strategy),
        10 => sector_schedules(),
        11 => determinism(strategy),
        _ => Err(format!("unknown criterion {id}")),
    };
    finish(id, outcome)
}

/// Runs `ids` in order. Criterion 11 reruns the others.
pub fn run_suite(ids: &[u8], strategy: Strategy) -> SuiteReport {
    let results = ids.iter().map(|&id| run_criterion(id, strategy)).collect();
    SuiteReport { results }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn q(n: i64, d: u64) -> Rational {
    Rational::from((n, d))
}

fn host() -> Arc {
    Arc::new(q(1, 8), q(1, 32)).expect("valid host arc")
}

fn o(s: &str) -> Ordinal {
    s.parse().expect("ordinal literal")
}

fn f6(x: &Float) -> String {
    format!("{:.6}", x.to_f64())
}

// 1

fn rank_construction() -> Outcome {
    let alphas = ["1", "2", "3", "4", "w", "w+1", "w+2", "w*2", "w^2", "w^2+w"];
    let mut oracle = PruningOracle::new();
    let mut checked = 0;
    for a in alphas {
        let alpha = o(a);
        let nus: &[u64] = if alpha.is_successor() { &[1, 2, 3] } else { &[1] };
        for &nu in nus {
            let e = build_rank_set(&alpha, nu, &host()).map_err(err)?;
            let tag = format!("alpha {a} nu {nu}");
            match alpha.predecessor().map_err(err)? {
                Some(p) => {
                    if e.derive(&p).cardinality() != Card::Finite(nu) {
                        return Ok((false, format!("{tag}: |E^(alpha-1)| != nu")));
                    }
                    if !e.derive(&alpha).is_empty() {
                        return Ok((false, format!("{tag}: E^(alpha) not empty")));
                    }
                }
                None => {
                    if e.derive(&alpha).cardinality() != Card::Finite(1) {
                        return Ok((false, format!("{tag}: |E^(alpha)| != 1")));
                    }
                }
            }
            // isolatedness: no point of E is a limit point of E
            let first = e.derive_once();
            if e.materialize(3, 3).iter().any(|p| first.contains(p))
                || first.materialize(3, 3).iter().any(|p| e.contains(p))
            {
                return Ok((false, format!("{tag}: E meets E^(1)")));
            }
            // successor chains from 0 and from each limit stage below alpha
            let mut starts = vec![Ordinal::zero()];
            starts.extend(["w", "w*2", "w^2"].iter().map(|s| o(s)).filter(|b| *b < alpha));
            for beta in starts {
                let mut step = e.derive(&beta);
                for k in 1..=6u64 {
                    step = step.derive_once();
                    if step != e.derive(&beta.add(&Ordinal::finite(k))) {
                        return Ok((
                            false,
                            format!("{tag}: derive({beta}+{k}) disagrees with iterated derive_once"),
                        ));
                    }
                }
            }
            // tag-free pruning oracle on the finite stages
            for k in 0..=3 {
                if oracle.pruned_points(&e, k, 3, 3) != e.derive(&Ordinal::finite(k as u64)).materialize(3, 3) {
                    return Ok((false, format!("{tag}: pruning oracle disagrees at stage {k}")));
                }
            }
            checked += 1;
        }
    }
    Ok((
        true,
        format!("{checked} sets, chains of 6 and oracle stages 0..3 agree"),
    ))
}

// 2

fn random_arc_pair(rng: &mut ChaCha8Rng) -> (Arc, Arc) {
    let hw = |rng: &mut ChaCha8Rng| q(1, rng.gen_range(20..=64));
    let a_center = q(rng.gen_range(1..=199), 400);
    let b_center = q(rng.gen_range(201..=399), 400);
    let a = Arc::new(a_center, hw(rng)).expect("small arc");
    let b = Arc::new(b_center, hw(rng)).expect("small arc");
    (a, b)
}

fn random_set(rng: &mut ChaCha8Rng, arc: &Arc) -> RankTree {
    const POOL: [&str; 9] = ["1", "2", "3", "4", "w", "w+1", "w+3", "w*2", "w^2"];
    let alpha = o(POOL[rng.gen_range(0..POOL.len())]);
    let nu = if alpha.is_successor() { rng.gen_range(1..=3) } else { 1 };
    build_rank_set(&alpha, nu, arc).expect("valid parameters")
}

fn union_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pairs = 0;
    let mut stages = 0;
    while pairs < 100 {
        let (arc_a, arc_b) = random_arc_pair(&mut rng);
        if !arc_a.strongly_disjoint(&arc_b) {
            continue;
        }
        let a = random_set(&mut rng, &arc_a);
        let b = random_set(&mut rng, &arc_b);
        let u = union_disjoint(vec![(a.clone(), arc_a.clone()), (b.clone(), arc_b.clone())]).map_err(err)?;
        let top = top_rank(&a).max(top_rank(&b)).successor();
        for beta in enumerate_below(&top.successor(), 12) {
            let lhs = u.derive(&beta);
            let rhs = union_disjoint(vec![(a.derive(&beta), arc_a.clone()), (b.derive(&beta), arc_b.clone())])
                .map_err(err)?;
            if lhs != rhs {
                return Ok((false, format!("pair {pairs}: union law fails at {beta}")));
            }
            stages += 1;
        }
        pairs += 1;
    }
    Ok((true, format!("{pairs} pairs, {stages} stages equal")))
}

fn top_rank(t: &RankTree) -> Ordinal {
    t.nodes()
        .iter()
        .map(|(n, cut)| n.rank().add(cut))
        .max()
        .unwrap_or_else(Ordinal::zero)
}

// 3

fn singleton_refinement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let sources = [
        ("3", 2, "1"),
        ("4", 1, "2"),
        ("w+1", 1, "3"),
        ("w+2", 2, "w"),
        ("w*2", 1, "w+1"),
        ("w^2", 1, "w*2+1"),
    ];
    let mut done = 0;
    let mut tries = 0;
    while done < 20 {
        tries += 1;
        let (a, nu, b) = sources[done % sources.len()];
        let e = build_rank_set(&o(a), nu, &host()).map_err(err)?;
        let beta = o(b);
        let level = e.derive(&beta);
        let count = match level.cardinality() {
            Card::Finite(n) => n as usize,
            Card::Infinite => 12,
        };
        let candidates = level.enumerate_points(count).map_err(err)?;
        let target = &candidates[rng.gen_range(0..candidates.len())];
        let refined = singleton_refine(&e, &beta, target).map_err(err)?;
        let top = refined.derive(&beta);
        if top != RankTree::leaf(target.clone()) {
            return Ok((
                false,
                format!("E({a},{nu}) at {b}: refinement keeps {:?} points", top.cardinality()),
            ));
        }
        if refined.materialize(3, 3).iter().any(|p| !e.contains(p)) {
            return Ok((false, format!("E({a},{nu}) at {b}: refinement leaves the set")));
        }
        done += 1;
        if tries > 100 {
            break;
        }
    }
    Ok((done == 20, format!("{done} triples refine to their target")))
}

// 4

fn radii_validity() -> Outcome {
    let radii = RadiiSequence::fibonacci(12).map_err(err)?;
    for n in 1..=12 {
        let sum = radii.log_radius(n) + radii.log_radius(n + 1);
        if radii.log_radius(n + 2) != sum {
            return Ok((false, format!("a_{} != a_{} a_{}", n + 2, n + 1, n)));
        }
    }
    let first = radii.growth_threshold(default_precision());
    let second = RadiiSequence::fibonacci(12)
        .map_err(err)?
        .growth_threshold(default_precision());
    let Some(threshold) = first else {
        return Ok((false, "growth threshold not reached within the stored radii".into()));
    };
    if first != second {
        return Ok((false, "growth threshold unstable".into()));
    }
    let schedule = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).map_err(err)?;
    let mut worst = 0.0f64;
    for s in [q(1, 1), q(1, 100)] {
        let report = convergence_exponent_check(&schedule, &s, 20, default_precision());
        worst = worst.max(report.tail_bound);
    }
    let pass = worst < 1e-6;
    Ok((
        pass,
        format!("product law n <= 12, threshold index {threshold}, tail after 20 terms {worst:.3e}"),
    ))
}

// 5

fn schedule_counting() -> Outcome {
    let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 10).map_err(err)?;
    for n in 1..=10 {
        if s.row_count(n) != n {
            return Ok((false, format!("ring {n} carries {} zeros", s.row_count(n))));
        }
    }
    let c = s.sources()[0].set.enumerate_points(4).map_err(err)?;
    let spot = |l: usize, ring: usize, m: usize| {
        s.zero(l)
            .is_some_and(|z| z.turn == c[m - 1] && z.log_r == s.radii().log_radius(ring) && z.row == ring)
    };
    if !(spot(1, 1, 1) && spot(3, 2, 2) && spot(7, 4, 1)) {
        return Ok((false, "spot values differ".into()));
    }
    if (7..=10).any(|l| s.row_of(l) != Some(4)) {
        return Ok((false, "s(7..10) != 4".into()));
    }
    Ok((true, "ring counts 1..10, b_1, b_3, b_7 and s(7..10) = 4".into()))
}

// 6

const ALPHA0: (i64, u64) = (3, 10);

fn sector_divergence() -> Outcome {
    let prec = default_precision();
    let s = build_finite_schedule(&Ordinal::finite(3), 2, &host(), 12).map_err(err)?;
    let alpha0 = q(ALPHA0.0, ALPHA0.1);
    let mut worst: Option<Float> = None;
    let mut ray_bounds = Vec::new();
    for n in 3..=8 {
        let (lo, hi) = (s.radii().log_radius(n), s.radii().log_radius(n + 1));
        let mut ray_min: Option<Float> = None;
        for i in 1..=20u64 {
            let log_r = &lo + Rational::from(&hi - &lo) * q(i as i64, 20);
            for turn in [Rational::from(3u32) / 8u32 + q((i - 1) as i64, 19) / 2u32, q(5, 8)] {
                let z = LogPolar::from_log_turn(log_r.clone(), turn.clone(), prec);
                let rep = sector_bound_check(&s, &z, &alpha0).map_err(err)?;
                if rep.n != n {
                    return Ok((false, format!("sample {i} of annulus {n} placed in annulus {}", rep.n)));
                }
                if !rep.pass {
                    return Ok((false, format!("annulus {n}: {} < {}", f6(&rep.lhs), f6(&rep.rhs))));
                }
                let margin = rep.margin();
                if worst.as_ref().is_none_or(|w| margin < *w) {
                    worst = Some(margin);
                }
                if turn == q(5, 8) && ray_min.as_ref().is_none_or(|m| rep.lhs < *m) {
                    ray_min = Some(rep.lhs.clone());
                }
            }
        }
        ray_bounds.push(ray_min.expect("samples taken"));
    }
    // the closed-form bound itself dips on 5..8 at this gap; the certified
    // lower bounds along the ray must still climb
    let formula: Vec<String> = (5..=8).map(|n| f6(&sector_lower_bound(n, &alpha0, prec))).collect();
    let climbing = ray_bounds.windows(2).all(|w| w[1] > w[0]);
    let ray: Vec<String> = ray_bounds.iter().map(f6).collect();
    Ok((
        climbing,
        format!(
            "240 samples pass, min margin {}; ray 5/8 lower bounds n=3..8 [{}]; closed form [{}]",
            f6(&worst.expect("samples taken")),
            ray.join(", "),
            formula.join(", ")
        ),
    ))
}

// 7

fn targets(s: &ZeroSchedule, count: usize) -> Result<Vec<Rational>, String> {
    s.sources()[0].set.enumerate_points(count).map_err(err)
}

fn zero_clustering() -> Outcome {
    let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).map_err(err)?;
    let delta = q(1, 1000);
    let cs = targets(&s, 5)?;
    let mut worst = 0.0f64;
    for r in [q(3, 10), q(7, 10)] {
        let rule = DilationRule::RatioPlus { r: r.clone() };
        for (m, c) in cs.iter().enumerate() {
            let cert = non_c0_certificate(&s, &rule, c, &delta, 6..=10).map_err(err)?;
            if !cert.pass {
                return Ok((false, format!("r = {r}, c_{}: certificate fails", m + 1)));
            }
            let last = cert.rows.last().expect("rows").distance_hi.to_f64() / r.to_f64();
            worst = worst.max(last);
        }
    }
    Ok((true, format!("10 certificates, largest final distance/r {worst:.3e}")))
}

// 8

fn immunity() -> Outcome {
    let prec = default_precision();
    let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).map_err(err)?;
    let r = q(1, 2);
    let rule = DilationRule::GeometricMean {
        l: q(1, 1),
        r: r.clone(),
    };
    let class = classify(&rule, s.radii(), 4..=8).map_err(err)?;
    if class.branch != Branch::Neither {
        return Ok((false, format!("classified as {:?}", class.branch)));
    }
    for c in targets(&s, 5)? {
        if non_c0_certificate(&s, &rule, &c, &q(1, 1000), 4..=8).map_err(err)?.pass {
            return Ok((false, format!("certificate at {c} passes")));
        }
    }
    let mut mins = Vec::new();
    for row in &class.trail {
        let Some(m) = min_log_modulus_on_circle(&s, &row.j, &r, 36, 12, prec).map_err(err)? else {
            return Ok((false, format!("k = {}: circle outside the certified region", row.k)));
        };
        // threshold log|f| > k
        if m <= row.k as f64 {
            return Ok((false, format!("k = {}: min log|f| {} below threshold", row.k, f6(&m))));
        }
        mins.push(m);
    }
    let increasing = mins.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = mins.iter().map(f6).collect();
    Ok((
        increasing,
        format!(
            "neither; 5 certificates fail; min log|f| on |z|=1/2 [{}]",
            shown.join(", ")
        ),
    ))
}

// 9

fn condition_m(strategy: Strategy) -> Outcome {
    let prec = default_precision();
    let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).map_err(err)?;
    let r = q(1, 2);
    let rule = DilationRule::RatioPlus { r: r.clone() };
    let c1 = targets(&s, 1)?.remove(0);
    let points = [ProbePoint { turn: c1, r: r.clone() }, ProbePoint { turn: q(5, 8), r }];
    let js = |n: usize| rule.j(s.radii(), n);
    let rows = condition_m_sweep(&s, &points, &js, 5..=9, 12, prec, strategy).map_err(err)?;
    if rows.iter().any(|row| !row.valid) {
        return Ok((false, "sample outside the certified region".into()));
    }
    let near: Vec<&Float> = rows.iter().filter(|row| row.i == 1).map(|row| &row.log_max).collect();
    let control: Vec<&Float> = rows.iter().filter(|row| row.i == 2).map(|row| &row.log_max).collect();
    let increasing = near.windows(2).all(|w| w[1] > w[0]);
    let exceeds = rows.iter().filter(|row| row.i == 1).all(|row| row.exceeds(row.n));
    // control bound: f# < 1
    let bounded = control.iter().all(|v| **v < 0);
    let show = |v: &[&Float]| v.iter().map(|x| f6(x)).collect::<Vec<_>>().join(", ");
    Ok((
        increasing && exceeds && bounded,
        format!("log max at r c_1 [{}]; control [{}]", show(&near), show(&control)),
    ))
}

// 10

fn sector_schedules() -> Outcome {
    let alpha = Ordinal::finite(3);
    let sector = build_sector_schedule(&alpha, 7).map_err(err)?;
    let limit = build_limit_schedule(&Ordinal::omega(), 5).map_err(err)?;
    for (name, s) in [("infinite-order", &sector), ("limit", &limit)] {
        if s.rings().len() < 12 {
            return Ok((false, format!("{name}: only {} rings", s.rings().len())));
        }
        if let Some(n) = s.sector_purity_violation() {
            return Ok((false, format!("{name}: ring {n} mixes sectors")));
        }
    }
    let delta = q(1, 1000);
    let r = q(1, 2);
    let mut cards = Vec::new();
    for t in 1..=2usize {
        let rule = DilationRule::Sector { r: r.clone(), t };
        let rep = order_report(&sector, &rule, 3, 3..=7, &delta).map_err(err)?;
        if rep.status != Status::Conclusive || rep.certificates.iter().any(|c| !c.pass) {
            return Ok((false, format!("sector {t}: certificates fail at {:?}", rep.failing)));
        }
        let below = alpha.predecessor().map_err(err)?.expect("successor");
        let card = rep.rank_profile.get(&below);
        if card != Some(Card::Finite(t as u64)) {
            return Ok((false, format!("sector {t}: rank-(alpha-1) cardinality {card:?}")));
        }
        cards.push(t.to_string());
    }
    Ok((
        true,
        format!(
            "purity on {} and {} rings; sector certificates pass; rank-2 cardinalities [{}]",
            sector.rings().len(),
            limit.rings().len(),
            cards.join(", ")
        ),
    ))
}

// 11

fn determinism(strategy: Strategy) -> Outcome {
    let ids: Vec<u8> = (1..=10).collect();
    let first = serde_json::to_vec_pretty(&run_suite(&ids, strategy)).map_err(err)?;
    let second = serde_json::to_vec_pretty(&run_suite(&ids, strategy)).map_err(err)?;
    Ok((
        first == second,
        format!("two runs of criteria 1..10, {} report bytes", first.len()),
    ))
}
