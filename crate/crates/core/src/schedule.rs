//! Zero schedules: where the zeros of the product `∏(1 − z/b_l)` sit.
//!
//! Radii are kept as exact log-radii `log a_m` (never as numbers: `a_10` is
//! already `e^89`). Zeros are grouped into rings of equal radius; ring `m`
//! has radius `a_m`.
//!
//! * Row layout: ring `n` carries `a_n c_1, …, a_n c_n` for an enumeration
//!   `c_1, c_2, …` of one rank set.
//! * Sector layout: block `n` consists of rings `n(n−1)/2 + t` for
//!   `t = 1..=n`; ring `(n, t)` carries the first `n` points of the set
//!   hosted by sector `t`. Every ring therefore draws from one sector only.

use std::ops::Range;

use rug::float::Round;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{de_rational, pow2, ser_rational};
use crate::interval::Interval;
use crate::ordinal::{nth_below, Ordinal};
use crate::pointset::{build_rank_set, Arc, Card, PointsetError, RankTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("need at least {0} radii")]
    TooFewRadii(usize),
    #[error("log-radii must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("product growth a(n+2) >= a(n+1) a(n) fails at n = {0}")]
    ProductGrowth(usize),
    #[error("the row layout needs {required} points of the source set: {source}")]
    InsufficientPoints { required: usize, source: PointsetError },
    #[error("{0} is a limit ordinal; use the limit schedule")]
    LimitAlpha(Ordinal),
    #[error("{0} is not a limit ordinal; use the sector schedule")]
    SuccessorAlpha(Ordinal),
    #[error("alpha must be at least 1")]
    ZeroAlpha,
    #[error("block count must be at least 1")]
    NoBlocks,
    #[error("rank set construction failed: {0}")]
    Pointset(#[from] PointsetError),
    #[error("malformed schedule: {0}")]
    Malformed(String),
}

/// Exact log-radii `log a_1, log a_2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct RadiiSequence {
    log_radii: Vec<Rational>,
}

impl TryFrom<Vec<String>> for RadiiSequence {
    type Error = ScheduleError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        let parsed = v
            .iter()
            .map(|s| {
                crate::exact::parse_rational(s).ok_or_else(|| ScheduleError::Malformed(format!("bad log-radius {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RadiiSequence::from_log_radii(parsed)
    }
}

impl From<RadiiSequence> for Vec<String> {
    fn from(r: RadiiSequence) -> Self {
        r.log_radii.iter().map(|q| q.to_string()).collect()
    }
}

/// `a(n+2) ≥ a(n+1)·a(n)` in log form; returns the first failing `n`.
fn product_growth_violation(logs: &[Rational]) -> Option<usize> {
    logs.windows(3)
        .position(|w| w[2] < Rational::from(&w[1] + &w[0]))
        .map(|i| i + 1)
}

impl RadiiSequence {
    /// Fibonacci log-radii `1, 2, 3, 5, 8, …`.
    pub fn fibonacci(n_max: usize) -> Result<Self, ScheduleError> {
        if n_max < 3 {
            return Err(ScheduleError::TooFewRadii(3));
        }
        let mut logs = vec![Rational::from(1), Rational::from(2)];
        while logs.len() < n_max {
            let n = logs.len();
            logs.push(Rational::from(&logs[n - 1] + &logs[n - 2]));
        }
        Ok(RadiiSequence { log_radii: logs })
    }

    /// Validates a user-supplied sequence: strictly increasing and
    /// satisfying the product growth condition.
    pub fn from_log_radii(log_radii: Vec<Rational>) -> Result<Self, ScheduleError> {
        if log_radii.len() < 3 {
            return Err(ScheduleError::TooFewRadii(3));
        }
        if let Some(i) = log_radii.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ScheduleError::NotIncreasing(i + 2));
        }
        if log_radii[0] <= 0 {
            return Err(ScheduleError::Malformed("log a_1 must be positive".into()));
        }
        if let Some(n) = product_growth_violation(&log_radii) {
            return Err(ScheduleError::ProductGrowth(n));
        }
        Ok(RadiiSequence { log_radii })
    }

    pub fn len(&self) -> usize {
        self.log_radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_radii.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.log_radii
    }

    /// `log a_n` (1-based). Beyond the stored prefix the sequence continues
    /// by `log a(n) = log a(n−1) + log a(n−2)`.
    pub fn log_radius(&self, n: usize) -> Rational {
        assert!(n >= 1, "radii are indexed from 1");
        if n <= self.log_radii.len() {
            return self.log_radii[n - 1].clone();
        }
        let len = self.log_radii.len();
        let mut prev = self.log_radii[len - 2].clone();
        let mut cur = self.log_radii[len - 1].clone();
        for _ in len..n {
            let next = Rational::from(&prev + &cur);
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    /// First failing index of the product growth condition, if any.
    pub fn product_growth_violation(&self) -> Option<usize> {
        product_growth_violation(&self.log_radii)
    }

    /// Smallest `n₀` such that `a_n ≥ 1/(1 − (1 − 2^−(n+1))^(1/(n+1)))` for
    /// every stored `n ≥ n₀`, decided with certified enclosures. `None` if
    /// it fails at the last stored index.
    pub fn growth_threshold(&self, prec: u32) -> Option<usize> {
        let holds: Vec<bool> = (1..=self.len()).map(|n| self.growth_bound_holds(n, prec)).collect();
        let first_tail = holds.iter().rposition(|h| !h).map_or(1, |i| i + 2);
        (first_tail <= self.len()).then_some(first_tail)
    }

    fn growth_bound_holds(&self, n: usize, start_prec: u32) -> bool {
        let mut prec = start_prec.max(64);
        let k = n as u32 + 1;
        loop {
            let x = Rational::from(1) - Rational::from((Integer::from(1), pow2(k)));
            let root = Interval::from_rational(&x, prec).root(k);
            let gap = Interval::from_i64(1, prec).sub(&root);
            let rhs = Interval::from_i64(1, prec).div(&gap);
            let lhs = Interval::from_rational(&self.log_radius(n), prec).exp();
            if lhs.lo >= rhs.hi {
                return true;
            }
            if lhs.certainly_lt(&rhs) {
                return false;
            }
            prec *= 2;
            assert!(prec <= 1 << 20, "growth bound undecidable at index {n}");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Variant {
    /// One rank set laid out row by row.
    FiniteOrder { alpha: Ordinal, nu: u64 },
    /// Sector `t` hosts a set with `t` points of rank `α − 1`.
    InfiniteOrder { alpha: Ordinal },
    /// Sector `t` hosts a set whose `β_t`-th derived set is one point.
    LimitOrdinal { alpha: Ordinal },
    /// Hand-made finite zero list; nothing beyond the stored rings.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zero {
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub log_r: Rational,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub turn: Rational,
    /// Ring index `s(l)`: the zero has modulus `a_row`.
    pub row: usize,
    pub sector: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub sector: usize,
    pub arc: Arc,
    pub set: RankTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    pub row: usize,
    pub log_r: Rational,
    pub sector: usize,
    pub zeros: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleJson", into = "ScheduleJson")]
pub struct ZeroSchedule {
    variant: Variant,
    n_max: usize,
    radii: RadiiSequence,
    zeros: Vec<Zero>,
    sources: Vec<Source>,
    rings: Vec<Ring>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleJson {
    variant: Variant,
    n_max: usize,
    log_radii: RadiiSequence,
    sources: Vec<Source>,
    zeros: Vec<Zero>,
}

impl From<ZeroSchedule> for ScheduleJson {
    fn from(s: ZeroSchedule) -> Self {
        ScheduleJson {
            variant: s.variant,
            n_max: s.n_max,
            log_radii: s.radii,
            sources: s.sources,
            zeros: s.zeros,
        }
    }
}

impl TryFrom<ScheduleJson> for ZeroSchedule {
    type Error = ScheduleError;

    fn try_from(j: ScheduleJson) -> Result<Self, Self::Error> {
        ZeroSchedule::assemble(j.variant, j.n_max, j.log_radii, j.sources, j.zeros)
    }
}

/// Angle of the sector-`t` ray, in turns: `1/4 − 1/2^(t+2)`.
pub fn sector_center(t: usize) -> Rational {
    Rational::from((1, 4)) - Rational::from((Integer::from(1), pow2(t as u32 + 2)))
}

/// Closed arc of sector `t`: half-width `1/(3·2^(t+4))` around
/// [`sector_center`].
pub fn sector_arc(t: usize) -> Arc {
    let hw = Rational::from((Integer::from(1), pow2(t as u32 + 4) * 3u32));
    Arc::new(sector_center(t), hw).expect("sector arcs are proper")
}

/// Global ring index of ring `t` in block `n`.
pub fn sector_ring(n: usize, t: usize) -> usize {
    n * (n - 1) / 2 + t
}

/// `(block, position)` of global ring `m`.
pub fn ring_position(m: usize) -> (usize, usize) {
    let mut n = 1;
    while sector_ring(n, n) < m {
        n += 1;
    }
    (n, m - sector_ring(n, 1) + 1)
}

/// The first `count` points of `set`, or all of them if it is smaller.
fn prefix(set: &RankTree, count: usize) -> Result<Vec<Rational>, PointsetError> {
    let count = match set.cardinality() {
        Card::Finite(n) => count.min(n as usize),
        Card::Infinite => count,
    };
    set.enumerate_points(count)
}

impl ZeroSchedule {
    fn assemble(
        variant: Variant,
        n_max: usize,
        radii: RadiiSequence,
        sources: Vec<Source>,
        zeros: Vec<Zero>,
    ) -> Result<Self, ScheduleError> {
        let mut rings: Vec<Ring> = Vec::new();
        for (l, z) in zeros.iter().enumerate() {
            if z.row == 0 || z.log_r != radii.log_radius(z.row) {
                return Err(ScheduleError::Malformed(format!("zero {} is off its ring", l + 1)));
            }
            match rings.last_mut() {
                Some(r) if r.row == z.row => {
                    if r.sector != z.sector {
                        return Err(ScheduleError::Malformed(format!("ring {} mixes sectors", r.row)));
                    }
                    r.zeros.end = l + 1;
                }
                last => {
                    let expected = last.map_or(1, |r| r.row + 1);
                    if z.row != expected {
                        return Err(ScheduleError::Malformed(format!(
                            "ring {expected} missing or out of order"
                        )));
                    }
                    rings.push(Ring {
                        row: z.row,
                        log_r: z.log_r.clone(),
                        sector: z.sector,
                        zeros: l..l + 1,
                    });
                }
            }
        }
        if radii.len() < rings.len() {
            return Err(ScheduleError::TooFewRadii(rings.len()));
        }
        Ok(ZeroSchedule {
            variant,
            n_max,
            radii,
            zeros,
            sources,
            rings,
        })
    }

    /// A schedule with no zeros (the constant function 1).
    pub fn empty(radii: RadiiSequence) -> Self {
        ZeroSchedule {
            variant: Variant::Explicit,
            n_max: 0,
            radii,
            zeros: Vec::new(),
            sources: Vec::new(),
            rings: Vec::new(),
        }
    }

    /// A schedule built from explicit zeros `(log-radius index, turn)`,
    /// grouped into consecutive rings. Used for small hand-made examples.
    pub fn from_zeros(radii: RadiiSequence, zeros: Vec<(usize, Rational)>) -> Result<Self, ScheduleError> {
        let zeros = zeros
            .into_iter()
            .map(|(row, turn)| Zero {
                log_r: radii.log_radius(row.max(1)),
                turn: crate::exact::normalize_turn(&turn),
                row,
                sector: 1,
            })
            .collect();
        let n_max = radii.len();
        Self::assemble(Variant::Explicit, n_max, radii, Vec::new(), zeros)
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn radii(&self) -> &RadiiSequence {
        &self.radii
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    /// `b_l` for `l ≥ 1`.
    pub fn zero(&self, l: usize) -> Option<&Zero> {
        l.checked_sub(1).and_then(|i| self.zeros.get(i))
    }

    /// `s(l)`.
    pub fn row_of(&self, l: usize) -> Option<usize> {
        self.zero(l).map(|z| z.row)
    }

    pub fn row_count(&self, row: usize) -> usize {
        self.zeros.iter().filter(|z| z.row == row).count()
    }

    /// Upper bound on the number of zeros on `|z| = a_m`, valid also for
    /// rings beyond the stored ones.
    pub fn ring_count_bound(&self, m: usize) -> usize {
        if let Some(r) = self.rings.get(m.wrapping_sub(1)) {
            return r.zeros.len();
        }
        match self.variant {
            Variant::Explicit => 0,
            Variant::FiniteOrder { .. } => m,
            _ => ring_position(m).0,
        }
    }

    /// Index of the first ring whose zeros come from more than one sector.
    pub fn sector_purity_violation(&self) -> Option<usize> {
        let mut by_row: std::collections::BTreeMap<usize, usize> = Default::default();
        for z in &self.zeros {
            if *by_row.entry(z.row).or_insert(z.sector) != z.sector {
                return Some(z.row);
            }
        }
        None
    }

    pub fn source(&self, sector: usize) -> Option<&Source> {
        self.sources.iter().find(|s| s.sector == sector)
    }
}

/// Row layout over `e`: ring `n ≤ n_max` carries `a_n c_1, …, a_n c_n`.
pub fn build_rows(
    e: &RankTree,
    host: &Arc,
    radii: &RadiiSequence,
    n_max: usize,
) -> Result<ZeroSchedule, ScheduleError> {
    if radii.len() < n_max {
        return Err(ScheduleError::TooFewRadii(n_max));
    }
    let points = e
        .enumerate_points(n_max)
        .map_err(|source| ScheduleError::InsufficientPoints {
            required: n_max,
            source,
        })?;
    let apex_rank = e
        .nodes()
        .iter()
        .map(|(n, cut)| n.rank().add(cut))
        .max()
        .unwrap_or_else(Ordinal::zero);
    let nu = match e.derive(&apex_rank).cardinality() {
        Card::Finite(k) => k,
        Card::Infinite => unreachable!("top derived set of a constructed set is finite"),
    };
    let mut zeros = Vec::with_capacity(n_max * (n_max + 1) / 2);
    for n in 1..=n_max {
        let log_r = radii.log_radius(n);
        for c in &points[..n] {
            zeros.push(Zero {
                log_r: log_r.clone(),
                turn: c.clone(),
                row: n,
                sector: 1,
            });
        }
    }
    ZeroSchedule::assemble(
        Variant::FiniteOrder {
            alpha: apex_rank.successor(),
            nu,
        },
        n_max,
        radii.clone(),
        vec![Source {
            sector: 1,
            arc: host.clone(),
            set: e.clone(),
        }],
        zeros,
    )
}

/// `build_rank_set(α, ν, host)` followed by [`build_rows`] on Fibonacci radii.
pub fn build_finite_schedule(
    alpha: &Ordinal,
    nu: u64,
    host: &Arc,
    n_max: usize,
) -> Result<ZeroSchedule, ScheduleError> {
    if alpha.is_limit() {
        return Err(ScheduleError::LimitAlpha(alpha.clone()));
    }
    let e = build_rank_set(alpha, nu, host)?;
    let radii = RadiiSequence::fibonacci(n_max.max(3))?;
    build_rows(&e, host, &radii, n_max)
}

fn sector_layout(variant: Variant, sets: Vec<RankTree>, blocks: usize) -> Result<ZeroSchedule, ScheduleError> {
    let rings = sector_ring(blocks, blocks);
    let radii = RadiiSequence::fibonacci(rings.max(3))?;
    let prefixes = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            prefix(s, blocks).map_err(|source| ScheduleError::InsufficientPoints {
                required: blocks,
                source: PointsetError::Malformed(format!("sector {}: {source}", i + 1)),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut zeros = Vec::new();
    for n in 1..=blocks {
        for t in 1..=n {
            let row = sector_ring(n, t);
            let log_r = radii.log_radius(row);
            let pts = &prefixes[t - 1];
            for turn in &pts[..n.min(pts.len())] {
                zeros.push(Zero {
                    log_r: log_r.clone(),
                    turn: turn.clone(),
                    row,
                    sector: t,
                });
            }
        }
    }
    let sources = sets
        .into_iter()
        .enumerate()
        .map(|(i, set)| Source {
            sector: i + 1,
            arc: sector_arc(i + 1),
            set,
        })
        .collect();
    ZeroSchedule::assemble(variant, blocks, radii, sources, zeros)
}

/// Sector layout with `E_t = E(α, t, Γ_t)` over `blocks` blocks.
pub fn build_sector_schedule(alpha: &Ordinal, blocks: usize) -> Result<ZeroSchedule, ScheduleError> {
    if alpha.is_zero() {
        return Err(ScheduleError::ZeroAlpha);
    }
    if alpha.is_limit() {
        return Err(ScheduleError::LimitAlpha(alpha.clone()));
    }
    if blocks == 0 {
        return Err(ScheduleError::NoBlocks);
    }
    let sets = (1..=blocks)
        .map(|t| build_rank_set(alpha, t as u64, &sector_arc(t)))
        .collect::<Result<Vec<_>, _>>()?;
    sector_layout(Variant::InfiniteOrder { alpha: alpha.clone() }, sets, blocks)
}

/// The ordinal `β_t` whose successor is the rank of sector `t` in the limit
/// layout.
pub fn limit_sector_rank(alpha: &Ordinal, t: usize) -> Ordinal {
    nth_below(alpha, t - 1).expect("limit ordinals have infinitely many predecessors")
}

/// Sector layout with `E_t = E(β_t + 1, 1, Γ_t)`, `β_t` the `t`-th ordinal
/// below `α`.
pub fn build_limit_schedule(alpha: &Ordinal, blocks: usize) -> Result<ZeroSchedule, ScheduleError> {
    if !alpha.is_limit() {
        return Err(ScheduleError::SuccessorAlpha(alpha.clone()));
    }
    if blocks == 0 {
        return Err(ScheduleError::NoBlocks);
    }
    let sets = (1..=blocks)
        .map(|t| build_rank_set(&limit_sector_rank(alpha, t).successor(), 1, &sector_arc(t)))
        .collect::<Result<Vec<_>, _>>()?;
    sector_layout(Variant::LimitOrdinal { alpha: alpha.clone() }, sets, blocks)
}

/// Certified `Σ_{n≤N} count_n / a_n^s` and bounds on the rest of the series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub exponent: String,
    pub terms: usize,
    pub partial_sum_lo: f64,
    pub partial_sum_hi: f64,
    /// Certified upper bound on the remainder: explicit terms until the
    /// term ratio drops to 1/2, then a geometric majorant.
    pub tail_bound: f64,
    /// The cruder majorant `Σ_{n>N} n·2^(−s·n)` from `a_n ≥ 2^n`.
    pub coarse_tail_bound: f64,
}

fn term(schedule: &ZeroSchedule, s: &Rational, n: usize, prec: u32) -> Interval {
    let count = Interval::from_i64(schedule.ring_count_bound(n) as i64, prec);
    let x = Interval::from_rational(&(s * schedule.radii.log_radius(n)), prec).neg();
    count.mul(&x.exp())
}

pub fn convergence_exponent_check(
    schedule: &ZeroSchedule,
    exponent: &Rational,
    terms: usize,
    prec: u32,
) -> ConvergenceReport {
    assert!(*exponent > 0, "convergence exponent must be positive");
    let zero = Interval::from_i64(0, prec);
    let partial = (1..=terms).fold(zero.clone(), |acc, n| acc.add(&term(schedule, exponent, n, prec)));

    // explicit terms until the stored radii are exhausted and successive
    // ratios are certified below 1/2; the recurrence keeps ratios falling
    let half = Interval::from_rational(&Rational::from((1, 2)), prec);
    let mut tail = zero;
    let mut n = terms + 1;
    loop {
        let t = term(schedule, exponent, n, prec);
        let next = term(schedule, exponent, n + 1, prec);
        if t.hi == 0 && n > schedule.radii.len() {
            break;
        }
        if n > schedule.radii.len() + 1 && t.lo > 0 && next.div(&t).certainly_lt(&half) {
            // t_n + t_{n+1} + … ≤ 2·t_n
            tail = tail.add(&t.mul(&Interval::from_i64(2, prec)));
            break;
        }
        tail = tail.add(&t);
        n += 1;
    }

    // Σ_{n>N} n x^n = x^{N+1}((N+1) − N x)/(1 − x)^2 with x = 2^{−s}
    let ln2 = Interval::from_i64(2, prec).ln();
    let x = Interval::from_rational(exponent, prec).mul(&ln2).neg().exp();
    let big_n = Interval::from_i64(terms as i64, prec);
    let xn1 = Interval::from_rational(&Rational::from(exponent * (terms as u64 + 1)), prec)
        .mul(&ln2)
        .neg()
        .exp();
    let one = Interval::from_i64(1, prec);
    let denom = one.sub(&x);
    let coarse = xn1.mul(&big_n.add(&one).sub(&big_n.mul(&x))).div(&denom.mul(&denom));

    ConvergenceReport {
        exponent: exponent.to_string(),
        terms,
        partial_sum_lo: partial.lo.to_f64_round(Round::Down),
        partial_sum_hi: partial.hi.to_f64_round(Round::Up),
        tail_bound: tail.hi.to_f64_round(Round::Up),
        coarse_tail_bound: coarse.hi.to_f64_round(Round::Up),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        crate::exact::parse_rational(s).unwrap()
    }

    fn host() -> Arc {
        Arc::new(q("1/8"), q("1/32")).unwrap()
    }

    #[test]
    fn fibonacci_prefix() {
        let r = RadiiSequence::fibonacci(12).unwrap();
        let first: Vec<Rational> = (1..=5).map(|n| r.log_radius(n)).collect();
        assert_eq!(first, [1, 2, 3, 5, 8].map(Rational::from));
        assert_eq!(r.log_radius(7), Rational::from(21));
        assert_eq!(r.log_radius(14), Rational::from(610));
        assert_eq!(r.product_growth_violation(), None);
        assert!(RadiiSequence::fibonacci(2).is_err());
    }

    #[test]
    fn growth_threshold_index() {
        let r = RadiiSequence::fibonacci(12).unwrap();
        assert_eq!(r.growth_threshold(128), Some(5));
        assert!(!r.growth_bound_holds(4, 128));
    }

    #[test]
    fn rejects_slow_radii() {
        let bad = vec![q("1"), q("2"), q("5/2"), q("9")];
        assert_eq!(RadiiSequence::from_log_radii(bad), Err(ScheduleError::ProductGrowth(1)));
        let flat = vec![q("1"), q("1"), q("3")];
        assert_eq!(
            RadiiSequence::from_log_radii(flat),
            Err(ScheduleError::NotIncreasing(2))
        );
    }

    #[test]
    fn rows_count_and_spot_values() {
        let s = build_finite_schedule(&Ordinal::finite(3), 2, &host(), 10).unwrap();
        let c = s.sources()[0].set.enumerate_points(4).unwrap();
        assert_eq!(s.zero(1).unwrap().turn, c[0]);
        assert_eq!(s.zero(3).unwrap().turn, c[1]);
        assert_eq!(s.zero(3).unwrap().log_r, Rational::from(2));
        assert_eq!(s.zero(7).unwrap().turn, c[0]);
        assert_eq!(s.zero(7).unwrap().log_r, Rational::from(5));
        for l in 7..=10 {
            assert_eq!(s.row_of(l), Some(4));
        }
        for n in 1..=10 {
            assert_eq!(s.row_count(n), n);
        }
        assert_eq!(
            *s.variant(),
            Variant::FiniteOrder {
                alpha: Ordinal::finite(3),
                nu: 2
            }
        );
    }

    #[test]
    fn finite_set_too_small_for_rows() {
        let err = build_finite_schedule(&Ordinal::finite(1), 2, &host(), 4).unwrap_err();
        assert!(matches!(err, ScheduleError::InsufficientPoints { required: 4, .. }));
    }

    #[test]
    fn sector_geometry() {
        for t in 1..10 {
            assert!(sector_arc(t).strongly_disjoint(&sector_arc(t + 1)));
            assert!(sector_center(t) < sector_center(t + 1));
        }
        assert_eq!(sector_ring(2, 2), 3);
        assert_eq!(sector_ring(3, 3), 6);
        assert_eq!(ring_position(6), (3, 3));
        assert_eq!(ring_position(7), (4, 1));
    }

    #[test]
    fn sector_schedule_rings() {
        let s = build_sector_schedule(&Ordinal::finite(2), 5).unwrap();
        assert_eq!(s.rings().len(), 15);
        assert_eq!(s.sector_purity_violation(), None);
        for ring in s.rings() {
            let (n, t) = ring_position(ring.row);
            assert_eq!(ring.sector, t);
            assert_eq!(ring.zeros.len(), n);
            if ring.row >= 3 {
                assert!(ring.zeros.len() < ring.row);
            }
        }
        assert!(matches!(
            build_sector_schedule(&Ordinal::omega(), 3),
            Err(ScheduleError::LimitAlpha(_))
        ));
    }

    #[test]
    fn limit_schedule_sources() {
        let s = build_limit_schedule(&Ordinal::omega(), 4).unwrap();
        for t in 1..=4 {
            let src = s.source(t).unwrap();
            let beta = Ordinal::finite(t as u64 - 1);
            assert_eq!(src.set.derive(&beta).cardinality(), Card::Finite(1));
        }
        assert!(matches!(
            build_limit_schedule(&Ordinal::finite(3), 3),
            Err(ScheduleError::SuccessorAlpha(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = build_sector_schedule(&Ordinal::finite(3), 3).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: ZeroSchedule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn convergence_edge_cases() {
        let s = build_finite_schedule(&Ordinal::finite(2), 1, &host(), 10).unwrap();
        let r0 = convergence_exponent_check(&s, &Rational::from(1), 0, 128);
        assert_eq!(r0.partial_sum_hi, 0.0);
        let r10 = convergence_exponent_check(&s, &Rational::from(1), 10, 128);
        assert!(r10.tail_bound < r10.coarse_tail_bound);
        assert!((r0.tail_bound - (r10.partial_sum_hi + r10.tail_bound)).abs() < 1e-9);
    }
}
