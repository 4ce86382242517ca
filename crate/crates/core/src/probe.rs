//! Probes of the dilation family `f_j(z) = f(jz)`.
//!
//! A point `w` is treated as a non-C₀ point of a sequence `f_{j_k}` when
//! zeros of `f_{j_k}` cluster at `w`; that is what the certificates here
//! measure, exactly, from the schedule. Convergence of the sequence itself
//! is never tested directly.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::evaluator::{family_log_spherical_derivative, log_eval, EvalError, LogPolar};
use crate::exact::{circular_distance, de_rational, parse_rational, same_turn, ser_rational};
use crate::interval::{certified_floor, Interval};
use crate::ordinal::Ordinal;
use crate::par::{self, Strategy};
use crate::pointset::{Card, RankProfile, RankTree};
use crate::schedule::{sector_ring, RadiiSequence, Variant, ZeroSchedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("invalid rule {0:?}")]
    BadRule(String),
    #[error("{0}")]
    Rule(String),
    #[error("k = {k} needs ring {ring}, beyond the {available} rings of the schedule")]
    RingBeyondSchedule { k: usize, ring: usize, available: usize },
    #[error("turn {0} lies in a source arc but is not a point of the source set")]
    TargetNotInSet(String),
    #[error("empty k range")]
    EmptyRange,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// How the dilation factors `j_k` are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DilationRule {
    /// `j_k = ⌊a_k/r + 1⌋`.
    RatioPlus { r: Rational },
    /// `j_k = ⌊L·√(a_k·a_(k+1))⌋`, probed at radius `r`.
    GeometricMean { l: Rational, r: Rational },
    /// `j_k = ⌊a_t^(k)/r + 1⌋` for `k ≥ t`, `a_t^(k)` the radius of ring
    /// `t` of block `k`.
    Sector { r: Rational, t: usize },
    /// `j_k` listed from `k = 1`, probed at radius `r`.
    Explicit { r: Rational, js: Vec<Integer> },
}

impl DilationRule {
    pub fn r(&self) -> &Rational {
        match self {
            DilationRule::RatioPlus { r }
            | DilationRule::GeometricMean { r, .. }
            | DilationRule::Sector { r, .. }
            | DilationRule::Explicit { r, .. } => r,
        }
    }

    fn validate(&self) -> Result<(), ProbeError> {
        let r = self.r();
        if *r <= 0 || *r >= 1 && !matches!(self, DilationRule::Explicit { .. }) {
            return Err(ProbeError::Rule("r must lie in (0, 1)".into()));
        }
        match self {
            DilationRule::GeometricMean { l, .. } if *l <= 0 => Err(ProbeError::Rule("L must be positive".into())),
            DilationRule::Sector { t: 0, .. } => Err(ProbeError::Rule("sector index starts at 1".into())),
            DilationRule::Explicit { js, .. }
                if js.windows(2).any(|w| w[1] <= w[0]) || js.first().is_some_and(|j| *j <= 0) =>
            {
                Err(ProbeError::Rule("explicit j_k must be positive and increasing".into()))
            }
            _ => Ok(()),
        }
    }

    /// Smallest usable `k`.
    pub fn first_k(&self) -> usize {
        match self {
            DilationRule::Sector { t, .. } => *t,
            _ => 1,
        }
    }

    /// Index of the radius `a_t^(k)` (sector rule) or `a_k`.
    fn radius_index(&self, k: usize) -> usize {
        match self {
            DilationRule::Sector { t, .. } => sector_ring(k, *t),
            _ => k,
        }
    }

    /// `j_k`, computed with enough precision to pin the floor.
    pub fn j(&self, radii: &RadiiSequence, k: usize) -> Result<Integer, ProbeError> {
        self.validate()?;
        if k < self.first_k() {
            return Err(ProbeError::Rule(format!(
                "k = {k} is below the first index {}",
                self.first_k()
            )));
        }
        let bits = |lr: &Rational| -> u32 { (lr.to_f64() * 1.45) as u32 + 64 };
        match self {
            DilationRule::RatioPlus { r } | DilationRule::Sector { r, .. } => {
                let lr = radii.log_radius(self.radius_index(k));
                Ok(certified_floor(bits(&lr), |p| {
                    Interval::from_rational(&lr, p)
                        .exp()
                        .div(&Interval::from_rational(r, p))
                        .add(&Interval::from_i64(1, p))
                }))
            }
            DilationRule::GeometricMean { l, .. } => {
                let half = (radii.log_radius(k) + radii.log_radius(k + 1)) / 2u32;
                Ok(certified_floor(bits(&half), |p| {
                    Interval::from_rational(&half, p)
                        .exp()
                        .mul(&Interval::from_rational(l, p))
                }))
            }
            DilationRule::Explicit { js, .. } => js
                .get(k - 1)
                .cloned()
                .ok_or_else(|| ProbeError::Rule(format!("no explicit j_{k}"))),
        }
    }
}

impl fmt::Display for DilationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DilationRule::RatioPlus { r } => write!(f, "ratio-plus:r={r}"),
            DilationRule::GeometricMean { l, r } => write!(f, "geometric-mean:l={l},r={r}"),
            DilationRule::Sector { r, t } => write!(f, "sector:r={r},t={t}"),
            DilationRule::Explicit { r, js } => {
                let list: Vec<String> = js.iter().map(|j| j.to_string()).collect();
                write!(f, "explicit:r={r},j={}", list.join(";"))
            }
        }
    }
}

impl FromStr for DilationRule {
    type Err = ProbeError;

    /// `ratio-plus:r=1/2`, `geometric-mean:l=1,r=1/2`, `sector:r=1/2,t=2`,
    /// `explicit:r=1,j=3;8;21`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProbeError::BadRule(s.to_string());
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let mut r = None;
        let mut l = None;
        let mut t = None;
        let mut js = None;
        for kv in params.split(',') {
            let (key, value) = kv.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "r" => r = Some(parse_rational(value).ok_or_else(bad)?),
                "l" | "L" => l = Some(parse_rational(value).ok_or_else(bad)?),
                "t" => t = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "j" => {
                    js = Some(
                        value
                            .split(';')
                            .map(|x| x.trim().parse::<Integer>().map_err(|_| bad()))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                _ => return Err(bad()),
            }
        }
        let rule = match kind.trim() {
            "ratio-plus" => DilationRule::RatioPlus { r: r.ok_or_else(bad)? },
            "geometric-mean" => DilationRule::GeometricMean {
                l: l.unwrap_or_else(|| Rational::from(1)),
                r: r.ok_or_else(bad)?,
            },
            "sector" => DilationRule::Sector {
                r: r.ok_or_else(bad)?,
                t: t.ok_or_else(bad)?,
            },
            "explicit" => DilationRule::Explicit {
                r: r.ok_or_else(bad)?,
                js: js.ok_or_else(bad)?,
            },
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl Serialize for DilationRule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DilationRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Which side of a ring the dilated probe circle `|z| = r` approaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `j_k·r/a_(n_k) → 1⁺`.
    TowardLower,
    /// `j_k·r/a_(n_k+1) → 1⁻`.
    TowardUpper,
    Neither,
}

fn sci(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(12))
}

fn ser_float<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sci(x))
}

fn ser_integer<S: Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// One row of the classification trail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub k: usize,
    #[serde(serialize_with = "ser_integer")]
    pub j: Integer,
    /// `n_k` with `a_(n_k) < j_k·r < a_(n_k+1)`.
    pub ring: usize,
    /// `log(j_k r) − log a_(n_k)`.
    #[serde(serialize_with = "ser_float")]
    pub lower_gap: Float,
    /// `log a_(n_k+1) − log(j_k r)`.
    #[serde(serialize_with = "ser_float")]
    pub upper_gap: Float,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub branch: Branch,
    pub trail: Vec<GapRow>,
}

/// Gap below which a monotone trail counts as converging.
pub const GAP_TOLERANCE: f64 = 1e-2;

/// Locates `j·r` between consecutive radii; `(ring, lower gap, upper gap)`
/// with gaps as midpoints of certified enclosures.
fn locate(radii: &RadiiSequence, j: &Integer, r: &Rational, hint: usize) -> (usize, Float, Float) {
    let log_est = (j.significant_bits() as f64) * std::f64::consts::LN_2;
    let mut prec = (log_est * 1.45) as u32 + 128;
    loop {
        let jr = Interval::from_integer(j, prec).mul(&Interval::from_rational(r, prec));
        let mut m = hint.max(1);
        // smallest m with a_(m+1) above j·r
        let radius = |m: usize| Interval::from_rational(&radii.log_radius(m), prec).exp();
        while m > 1 && !radius(m).certainly_lt(&jr) {
            m -= 1;
        }
        while radius(m + 1).certainly_lt(&jr) {
            m += 1;
        }
        let lower = jr.div(&radius(m));
        let upper = radius(m + 1).div(&jr);
        if radius(m).certainly_lt(&jr) && jr.certainly_lt(&radius(m + 1)) || m == 1 {
            let one = Interval::from_i64(1, prec);
            let gl = lower.sub(&one);
            let gu = upper.sub(&one);
            let to_log = |g: &Interval| -> Float {
                let mid = Float::with_val(prec, &g.lo + &g.hi) / 2u32;
                mid.ln_1p()
            };
            return (m, to_log(&gl), to_log(&gu));
        }
        prec *= 2;
        assert!(prec < 1 << 24, "cannot separate j·r from the radii");
    }
}

fn strictly_decreasing(xs: &[Float]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Which option of the ring dichotomy the sequence `j_k` realizes over
/// `ks`, judged from the log-gaps of `j_k·r` to the enclosing radii.
pub fn classify(
    rule: &DilationRule,
    radii: &RadiiSequence,
    ks: RangeInclusive<usize>,
) -> Result<Classification, ProbeError> {
    if ks.is_empty() {
        return Err(ProbeError::EmptyRange);
    }
    let mut trail = Vec::new();
    for k in ks {
        let j = rule.j(radii, k)?;
        let (ring, lower_gap, upper_gap) = locate(radii, &j, rule.r(), rule.radius_index(k));
        trail.push(GapRow {
            k,
            j,
            ring,
            lower_gap,
            upper_gap,
        });
    }
    let lower: Vec<Float> = trail.iter().map(|g| g.lower_gap.clone()).collect();
    let upper: Vec<Float> = trail.iter().map(|g| g.upper_gap.clone()).collect();
    let converges = |xs: &[Float]| strictly_decreasing(xs) && *xs.last().expect("non-empty") < GAP_TOLERANCE;
    let branch = if converges(&lower) {
        Branch::TowardLower
    } else if converges(&upper) {
        Branch::TowardUpper
    } else {
        Branch::Neither
    };
    Ok(Classification { branch, trail })
}

/// Distance from `r·e^{2πi·target}` to the nearest zero of `f_{j_k}` on one
/// ring, as an enclosure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertRow {
    pub k: usize,
    #[serde(serialize_with = "ser_integer")]
    pub j: Integer,
    pub ring: usize,
    #[serde(serialize_with = "ser_float")]
    pub distance_lo: Float,
    #[serde(serialize_with = "ser_float")]
    pub distance_hi: Float,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    #[serde(serialize_with = "ser_rational")]
    pub target: Rational,
    pub rows: Vec<CertRow>,
    pub pass: bool,
}

/// Rejects turns inside a source arc that are not points of its closure.
fn placement(schedule: &ZeroSchedule, turn: &Rational) -> Result<(), ProbeError> {
    let mut inside_arc = false;
    for src in schedule.sources() {
        if !src.arc.contains(turn) {
            continue;
        }
        inside_arc = true;
        if src.set.contains(turn) || src.set.derive_once().contains(turn) {
            return Ok(());
        }
    }
    if inside_arc || schedule.sources().is_empty() && schedule.zeros().iter().any(|z| same_turn(&z.turn, turn)) {
        if schedule.zeros().iter().any(|z| same_turn(&z.turn, turn)) {
            return Ok(());
        }
        return Err(ProbeError::TargetNotInSet(turn.to_string()));
    }
    Ok(())
}

/// `|ρe^{iθ} − re^{iφ}|` enclosed, `ρ = e^log_r / j`, `Δ = |θ − φ|` in turns.
fn distance(log_r: &Rational, j: &Integer, r: &Rational, delta: &Rational, prec: u32) -> Interval {
    let rho = Interval::from_rational(log_r, prec)
        .exp()
        .div(&Interval::from_integer(j, prec));
    let ri = Interval::from_rational(r, prec);
    let radial = rho.sub(&ri);
    let radial_abs = if radial.lo >= 0 {
        radial
    } else if radial.hi <= 0 {
        radial.neg()
    } else {
        Interval {
            lo: Float::new(prec),
            hi: radial.hi.clone().max(&(-radial.lo.clone())),
        }
    };
    if *delta == 0 {
        return radial_abs;
    }
    // lower: distance from r·e^{iφ} to the ray through θ; upper: triangle
    // inequality through r·e^{iθ}
    let angle = Interval::pi(prec).mul(&Interval::from_rational(&Rational::from(delta * 2u32), prec));
    let quarter = Rational::from((1, 4));
    let lo = if *delta >= quarter {
        ri.lo.clone()
    } else {
        ri.mul(&angle.sin_increasing()).lo
    };
    let hi = radial_abs.add(&ri.mul(&angle)).hi;
    Interval { lo, hi }
}

/// Zero-clustering certificate at `r·e^{2πi·target}` for `f_{j_k}`, `k ∈ ks`:
/// distances to the nearest zero must fall strictly and end below `r·δ`.
pub fn non_c0_certificate(
    schedule: &ZeroSchedule,
    rule: &DilationRule,
    target: &Rational,
    delta: &Rational,
    ks: RangeInclusive<usize>,
) -> Result<Certificate, ProbeError> {
    if ks.is_empty() {
        return Err(ProbeError::EmptyRange);
    }
    // off-set targets are certified against too; they fail on the angular gap
    placement(schedule, target)?;
    let r = rule.r();
    let mut rows = Vec::new();
    for k in ks {
        let j = rule.j(schedule.radii(), k)?;
        let (ring_idx, _, _) = locate(schedule.radii(), &j, r, rule.radius_index(k));
        let ring = schedule
            .rings()
            .get(ring_idx - 1)
            .ok_or(ProbeError::RingBeyondSchedule {
                k,
                ring: ring_idx,
                available: schedule.rings().len(),
            })?;
        let nearest = schedule.zeros()[ring.zeros.clone()]
            .iter()
            .map(|z| circular_distance(&z.turn, target))
            .min()
            .expect("rings are non-empty");
        let prec = (ring.log_r.to_f64() * 1.45) as u32 + 128;
        let d = distance(&ring.log_r, &j, r, &nearest, prec);
        rows.push(CertRow {
            k,
            j,
            ring: ring_idx,
            distance_lo: d.lo,
            distance_hi: d.hi,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].distance_hi < w[0].distance_lo);
    let threshold = Float::with_val(64, &Rational::from(r * delta));
    let small = rows.last().expect("non-empty").distance_hi < threshold;
    Ok(Certificate {
        target: target.clone(),
        pass: decreasing && small,
        rows,
    })
}

/// One cell of a condition-(M) sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub i: usize,
    #[serde(serialize_with = "ser_integer")]
    pub j: Integer,
    /// `log max f_j^#` over the disk mesh (`−inf` if `f` is constant).
    #[serde(serialize_with = "ser_float")]
    pub log_max: Float,
    pub samples: usize,
    pub valid: bool,
}

impl SweepRow {
    pub fn exceeds(&self, bound: usize) -> bool {
        self.log_max > Float::with_val(self.log_max.prec(), bound).ln()
    }
}

/// A probe centre `r·e^{2πi·turn}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbePoint {
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub turn: Rational,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub r: Rational,
}

fn cartesian_to_logpolar(x: Float, y: Float) -> LogPolar {
    let prec = x.prec();
    let norm2 = Float::with_val(prec, x.square_ref()) + Float::with_val(prec, y.square_ref());
    let phase = Float::with_val(prec, y.atan2_ref(&x));
    LogPolar::new(norm2.ln() / 2u32, phase)
}

/// Mesh of the closed disk of radius `radius` about `p`: the centre, `8k`
/// equally spaced points on the circle of radius `k·radius/3` for
/// `k = 1, 2, 3`, and every zero of `f_j` inside the disk.
pub fn disk_mesh(
    schedule: &ZeroSchedule,
    rows: usize,
    j: &Integer,
    p: &ProbePoint,
    radius: &Rational,
    prec: u32,
) -> Vec<LogPolar> {
    let centre = LogPolar::exact(Rational::new(), p.r.clone(), p.turn.clone(), prec);
    let tau = Float::with_val(prec, Constant::Pi) * 2u32;
    let theta = Float::with_val(prec, &tau * Float::with_val(prec, &p.turn));
    let cx = Float::with_val(prec, &p.r) * Float::with_val(prec, theta.cos_ref());
    let cy = Float::with_val(prec, &p.r) * Float::with_val(prec, theta.sin_ref());
    let mut mesh = vec![centre];
    for k in 1..=3u32 {
        let rho = Float::with_val(prec, radius * Rational::from((k, 3)));
        let count = 8 * k;
        for m in 0..count {
            let phi = Float::with_val(prec, &tau * Float::with_val(prec, &Rational::from((m, count))));
            let x = Float::with_val(
                prec,
                &cx + Float::with_val(prec, &rho * Float::with_val(prec, phi.cos_ref())),
            );
            let y = Float::with_val(
                prec,
                &cy + Float::with_val(prec, &rho * Float::with_val(prec, phi.sin_ref())),
            );
            mesh.push(cartesian_to_logpolar(x, y));
        }
    }
    let radius_f = Float::with_val(prec, radius);
    let end = schedule.rings().get(rows.wrapping_sub(1)).map_or(0, |r| r.zeros.end);
    for zero in &schedule.zeros()[..end] {
        // zero of f_j: b/j
        let w = LogPolar::exact(
            zero.log_r.clone(),
            Rational::from((Integer::from(1), j.clone())),
            zero.turn.clone(),
            prec,
        );
        let modulus = Float::with_val(prec, w.log_mag.exp_ref());
        let wx = Float::with_val(prec, &modulus * Float::with_val(prec, w.phase.cos_ref()));
        let wy = Float::with_val(prec, &modulus * Float::with_val(prec, w.phase.sin_ref()));
        let dx = Float::with_val(prec, &wx - &cx);
        let dy = Float::with_val(prec, &wy - &cy);
        if Float::with_val(prec, dx.hypot_ref(&dy)) <= radius_f {
            mesh.push(w);
        }
    }
    mesh
}

/// Maximum sampled `f_{j_n}^#` on the disks `|z − p_i| ≤ 1/n`, one cell per
/// `(n, i)`. Cells run in parallel under `strategy`.
pub fn condition_m_sweep(
    schedule: &ZeroSchedule,
    points: &[ProbePoint],
    js: &dyn Fn(usize) -> Result<Integer, ProbeError>,
    ns: RangeInclusive<usize>,
    rows: usize,
    prec: u32,
    strategy: Strategy,
) -> Result<Vec<SweepRow>, ProbeError> {
    let mut cells = Vec::new();
    for n in ns {
        let j = js(n)?;
        for i in 0..points.len() {
            cells.push((n, i, j.clone()));
        }
    }
    let results = par::map(strategy, &cells, |(n, i, j)| -> Result<SweepRow, ProbeError> {
        let radius = Rational::from((1, *n as u32));
        let mesh = disk_mesh(schedule, rows, j, &points[*i], &radius, prec);
        let mut best: Option<Float> = None;
        let mut valid = true;
        for z in &mesh {
            let jz = z.scaled(j);
            valid &= log_eval(schedule, &jz, rows)?.valid;
            let v = family_log_spherical_derivative(schedule, j, z, rows)?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        Ok(SweepRow {
            n: *n,
            i: *i + 1,
            j: j.clone(),
            log_max: best.expect("mesh is non-empty"),
            samples: mesh.len(),
            valid,
        })
    });
    results.into_iter().collect()
}

/// The set a report claims to be the non-C₀ set of the probed sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClaimedSet {
    /// `{0}`.
    OriginOnly,
    /// `{0} ∪ r·Ē` for the source set of `sector`.
    OriginAndScaledClosure {
        #[serde(serialize_with = "ser_rational")]
        r: Rational,
        sector: usize,
        set: RankTree,
    },
}

impl ClaimedSet {
    /// `|C^(β)|` for the claimed set `C`. The closure adds the first derived
    /// set to `E`, and the origin is an isolated point.
    pub fn rank_profile(&self, betas: &[Ordinal]) -> RankProfile {
        let entries = betas
            .iter()
            .map(|b| {
                let card = match self {
                    ClaimedSet::OriginOnly => Card::Finite(u64::from(b.is_zero())),
                    ClaimedSet::OriginAndScaledClosure { set, .. } => {
                        if b.is_zero() {
                            set.cardinality() + set.derive_once().cardinality() + Card::Finite(1)
                        } else {
                            set.derive(b).cardinality()
                        }
                    }
                };
                (b.clone(), card)
            })
            .collect();
        RankProfile { entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Conclusive,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rule: DilationRule,
    pub classification: Classification,
    /// Certificates at the first source points. Under `neither` they are
    /// expected to fail.
    pub certificates: Vec<Certificate>,
    pub claimed_non_c0: ClaimedSet,
    /// The `α` the ranks refer to.
    pub alpha: Ordinal,
    pub rank_profile: RankProfile,
    pub status: Status,
    #[serde(serialize_with = "ser_turns")]
    pub failing: Vec<Rational>,
}

fn ser_turns<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

/// The source set probed by `rule` and its rank `α`.
fn probed_source(schedule: &ZeroSchedule, rule: &DilationRule) -> Result<(usize, RankTree, Ordinal), ProbeError> {
    let sector = match rule {
        DilationRule::Sector { t, .. } => *t,
        _ => 1,
    };
    let src = schedule
        .source(sector)
        .ok_or_else(|| ProbeError::Rule(format!("schedule has no source for sector {sector}")))?;
    let alpha = match schedule.variant() {
        Variant::FiniteOrder { alpha, .. } | Variant::InfiniteOrder { alpha } => alpha.clone(),
        Variant::LimitOrdinal { alpha } => crate::schedule::limit_sector_rank(alpha, sector).successor(),
        Variant::Explicit => Ordinal::finite(1),
    };
    Ok((sector, src.set.clone(), alpha))
}

/// Classification, certificates for the first `depth` source points and
/// the rank profile of the claimed non-C₀ set.
pub fn order_report(
    schedule: &ZeroSchedule,
    rule: &DilationRule,
    depth: usize,
    ks: RangeInclusive<usize>,
    delta: &Rational,
) -> Result<ProbeReport, ProbeError> {
    let classification = classify(rule, schedule.radii(), ks.clone())?;
    let (sector, set, alpha) = probed_source(schedule, rule)?;
    let targets = {
        let count = match set.cardinality() {
            Card::Finite(n) => depth.min(n as usize),
            Card::Infinite => depth,
        };
        set.enumerate_points(count)
            .map_err(|e| ProbeError::Rule(e.to_string()))?
    };
    let mut certificates = Vec::new();
    for (m, target) in targets.iter().enumerate() {
        // the m-th point first appears on the ring of index m
        let lo = (*ks.start()).max(m + 1).max(rule.first_k());
        let range = lo..=(*ks.end()).max(lo);
        certificates.push(non_c0_certificate(schedule, rule, target, delta, range)?);
    }
    let clustering = classification.branch != Branch::Neither;
    let failing: Vec<Rational> = certificates
        .iter()
        .filter(|c| c.pass != clustering)
        .map(|c| c.target.clone())
        .collect();
    let claimed_non_c0 = if clustering {
        ClaimedSet::OriginAndScaledClosure {
            r: rule.r().clone(),
            sector,
            set,
        }
    } else {
        ClaimedSet::OriginOnly
    };
    let mut betas = vec![Ordinal::zero(), Ordinal::finite(1)];
    if let Ok(Some(p)) = alpha.predecessor() {
        betas.push(p);
    }
    betas.push(alpha.clone());
    betas.dedup();
    betas.sort();
    betas.dedup();
    let rank_profile = claimed_non_c0.rank_profile(&betas);
    Ok(ProbeReport {
        rule: rule.clone(),
        classification,
        certificates,
        claimed_non_c0,
        alpha,
        rank_profile,
        status: if failing.is_empty() {
            Status::Conclusive
        } else {
            Status::Inconclusive
        },
        failing,
    })
}

/// Minimum of `log|f_j|` over `count` equally spaced points of `|z| = r`,
/// minus the tail bound; `None` if any sample is outside the certified
/// region.
pub fn min_log_modulus_on_circle(
    schedule: &ZeroSchedule,
    j: &Integer,
    r: &Rational,
    count: u32,
    rows: usize,
    prec: u32,
) -> Result<Option<Float>, ProbeError> {
    let mut best: Option<Float> = None;
    for m in 0..count {
        let z = LogPolar::exact(Rational::new(), r.clone(), Rational::from((m, count)), prec);
        let e = log_eval(schedule, &z.scaled(j), rows)?;
        if !e.valid {
            return Ok(None);
        }
        let mut v = Float::with_val(prec, &e.value.log_mag - &e.tail_bound);
        v.set_prec_round(prec, Round::Down);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::Arc;
    use crate::schedule::build_finite_schedule;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn host() -> Arc {
        Arc::new(q("1/8"), q("1/32")).unwrap()
    }

    #[test]
    fn rule_parsing_round_trips() {
        for s in [
            "ratio-plus:r=1/2",
            "geometric-mean:l=1,r=1/2",
            "sector:r=1/2,t=2",
            "explicit:r=1,j=3;8;21",
        ] {
            let rule: DilationRule = s.parse().unwrap();
            assert_eq!(rule.to_string(), s);
        }
        assert!("ratio-plus:r=3/2".parse::<DilationRule>().is_err());
        assert!("ratio-plus".parse::<DilationRule>().is_err());
        assert!("explicit:r=1,j=8;3".parse::<DilationRule>().is_err());
    }

    #[test]
    fn ratio_plus_j5() {
        let radii = RadiiSequence::fibonacci(10).unwrap();
        let rule = DilationRule::RatioPlus { r: q("1/2") };
        assert_eq!(rule.j(&radii, 5).unwrap(), 5962);
    }

    #[test]
    fn classify_examples() {
        let radii = RadiiSequence::fibonacci(14).unwrap();
        let rp = classify(&DilationRule::RatioPlus { r: q("1/2") }, &radii, 4..=9).unwrap();
        assert_eq!(rp.branch, Branch::TowardLower);
        assert!(rp.trail.iter().all(|g| g.ring == g.k));
        let gm = classify(&DilationRule::GeometricMean { l: q("1"), r: q("1/2") }, &radii, 4..=9).unwrap();
        assert_eq!(gm.branch, Branch::Neither);
        // j_k = ⌈a_k⌉ with r = 1: j_k·r sits just above a_k
        let js: Vec<Integer> = (1..=9)
            .map(|k| certified_floor(64, |p| Interval::from_rational(&radii.log_radius(k), p).exp()) + 1u32)
            .collect();
        let ex = classify(&DilationRule::Explicit { r: q("1"), js }, &radii, 4..=9).unwrap();
        assert_eq!(ex.branch, Branch::TowardLower);
    }

    #[test]
    fn certificates_and_immunity() {
        let s = build_finite_schedule(&Ordinal::finite(3), 1, &host(), 12).unwrap();
        let c1 = s.sources()[0].set.enumerate_points(1).unwrap()[0].clone();
        let rule = DilationRule::RatioPlus { r: q("1/2") };
        let cert = non_c0_certificate(&s, &rule, &c1, &q("1/1000"), 6..=10).unwrap();
        assert!(cert.pass);
        let gm = DilationRule::GeometricMean { l: q("1"), r: q("1/2") };
        assert!(!non_c0_certificate(&s, &gm, &c1, &q("1/1000"), 4..=8).unwrap().pass);
        let off = non_c0_certificate(&s, &rule, &q("5/8"), &q("1/1000"), 6..=10).unwrap();
        assert!(!off.pass);
        let inside_arc_not_in_set = q("1/8") + q("1/64");
        assert!(matches!(
            non_c0_certificate(&s, &rule, &inside_arc_not_in_set, &q("1/1000"), 6..=10),
            Err(ProbeError::TargetNotInSet(_))
        ));
    }

    #[test]
    fn order_report_profile() {
        let s = build_finite_schedule(&Ordinal::finite(3), 2, &host(), 12).unwrap();
        let rule = DilationRule::RatioPlus { r: q("7/10") };
        let rep = order_report(&s, &rule, 3, 6..=10, &q("1/1000")).unwrap();
        assert_eq!(rep.status, Status::Conclusive);
        assert_eq!(rep.rank_profile.get(&Ordinal::finite(2)), Some(Card::Finite(2)));
        assert_eq!(rep.rank_profile.get(&Ordinal::finite(3)), Some(Card::Finite(0)));
        let gm = DilationRule::GeometricMean { l: q("1"), r: q("1/2") };
        let rep = order_report(&s, &gm, 3, 4..=8, &q("1/1000")).unwrap();
        assert_eq!(rep.claimed_non_c0, ClaimedSet::OriginOnly);
        assert_eq!(rep.rank_profile.get(&Ordinal::zero()), Some(Card::Finite(1)));
        assert_eq!(rep.rank_profile.get(&Ordinal::finite(1)), Some(Card::Finite(0)));
        assert_eq!(rep.status, Status::Conclusive);
    }

    #[test]
    fn sweep_on_empty_schedule_is_flat() {
        let s = ZeroSchedule::empty(RadiiSequence::fibonacci(3).unwrap());
        let pts = [ProbePoint {
            turn: q("1/8"),
            r: q("1/2"),
        }];
        let rows = condition_m_sweep(&s, &pts, &|n| Ok(Integer::from(n)), 5..=6, 0, 128, Strategy::Sequential).unwrap();
        assert!(rows.iter().all(|r| r.log_max.is_infinite() && !r.exceeds(0)));
        assert_eq!(rows[0].samples, 49);
    }
}
