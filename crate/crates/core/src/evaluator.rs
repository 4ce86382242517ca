//! Log-domain evaluation of `f(z) = ∏(1 − z/b_l)` over a zero schedule.
//!
//! Values are carried as `(log|·|, arg)` pairs of MPFR floats, so moduli like
//! `e^(10^16)` are unremarkable. Each factor goes through a kernel for
//! `log(1 − e^s)` with three branches:
//!
//! * `Re s < −40`: `log1p(−e^s)`,
//! * `Re s > 40`: `s + iπ + log1p(−e^(−s))`,
//! * otherwise `1 − e^s = −expm1(s)` with the real part formed as
//!   `expm1(x)·cos y − 2 sin²(y/2)` to avoid cancellation near `s = 0`.
//!
//! Truncating the product after `rows` rings leaves a remainder bounded by
//! `Σ_{m>rows} count_m·q_m/(1 − q_m)`, `q_m = |z|/a_m`; that bound is only
//! reported as valid while `log|z| ≤ log a_(rows−2)`.

use std::cmp::Ordering;

use rug::float::{Constant, Round, Special};
use rug::ops::AssignRound;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::exact::{normalize_turn, pow2};
use crate::interval::Interval;
use crate::par::{self, Strategy};
use crate::schedule::ZeroSchedule;

pub const DEFAULT_PRECISION: u32 = 200;
pub const PRECISION_ENV: &str = "TRANSFINITE_PRECISION";

/// Branch points of the factor kernel.
pub const KERNEL_SMALL: i32 = -40;
pub const KERNEL_LARGE: i32 = 40;

/// Working precision: `TRANSFINITE_PRECISION` if set and sane, else 200 bits.
pub fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|p| (64..=1 << 16).contains(p))
        .unwrap_or(DEFAULT_PRECISION)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("rows_used = {rows} but the schedule has {available} rings")]
    RowsOutOfRange { rows: usize, available: usize },
    #[error("z is the zero b_{0}; the logarithmic derivative has a pole there")]
    Pole(usize),
    #[error("|z| <= a_1: the sector bound needs a_1 < |z|")]
    InsideFirstRing,
    #[error("|z| is beyond the rings usable at this truncation")]
    OutsideTruncation,
    #[error("direction is {gap:.4} rad from the zero ray at turn {ray}, below the required {required}")]
    TooCloseToRay { ray: String, gap: f64, required: f64 },
}

/// Exact description `|z| = ratio·e^log_r`, `arg z = 2π·turn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPolar {
    pub log_r: Rational,
    pub ratio: Rational,
    pub turn: Rational,
}

/// A complex number as `(log|z|, arg z)`; `log_mag = −∞` means 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPolar {
    pub log_mag: Float,
    pub phase: Float,
    pub exact: Option<ExactPolar>,
}

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// Reduces an angle to `(−π, π]`.
fn normalize_phase(phi: Float) -> Float {
    let prec = phi.prec();
    let pi = Float::with_val(prec, Constant::Pi);
    let tau = two_pi(prec);
    let mut r = Float::with_val(prec, phi.remainder_ref(&tau));
    if r <= -pi.clone() {
        r += &tau;
    } else if r > pi {
        r -= &tau;
    }
    r
}

fn rational_float(q: &Rational, prec: u32) -> Float {
    Float::with_val(prec, q)
}

fn turn_radians(turn: &Rational, prec: u32) -> Float {
    let half = Rational::from((1, 2));
    let centred = normalize_turn(&(turn.clone() + &half)) - half;
    two_pi(prec) * rational_float(&centred, prec)
}

impl LogPolar {
    /// `ratio·e^log_r · e^{2πi·turn}` held exactly alongside its floats.
    pub fn exact(log_r: Rational, ratio: Rational, turn: Rational, prec: u32) -> Self {
        assert!(ratio > 0, "modulus ratio must be positive");
        let turn = normalize_turn(&turn);
        let log_mag = rational_float(&log_r, prec) + Float::with_val(prec, rational_float(&ratio, prec).ln_ref());
        LogPolar {
            log_mag,
            phase: turn_radians(&turn, prec),
            exact: Some(ExactPolar { log_r, ratio, turn }),
        }
    }

    /// `e^log_r · e^{2πi·turn}`.
    pub fn from_log_turn(log_r: Rational, turn: Rational, prec: u32) -> Self {
        Self::exact(log_r, Rational::from(1), turn, prec)
    }

    /// A point given by float log-modulus and phase (radians).
    pub fn new(log_mag: Float, phase: Float) -> Self {
        LogPolar {
            phase: normalize_phase(phase),
            log_mag,
            exact: None,
        }
    }

    pub fn zero(prec: u32) -> Self {
        LogPolar {
            log_mag: Float::with_val(prec, Special::NegInfinity),
            phase: Float::new(prec),
            exact: None,
        }
    }

    pub fn one(prec: u32) -> Self {
        LogPolar {
            log_mag: Float::new(prec),
            phase: Float::new(prec),
            exact: None,
        }
    }

    pub fn prec(&self) -> u32 {
        self.log_mag.prec().max(self.phase.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag.is_infinite() && self.log_mag < 0
    }

    /// `j·z` for a positive integer `j`.
    pub fn scaled(&self, j: &Integer) -> LogPolar {
        assert!(*j > 0, "dilation factors are positive");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec();
        match &self.exact {
            Some(e) => LogPolar::exact(e.log_r.clone(), Rational::from(&e.ratio * j), e.turn.clone(), prec),
            None => LogPolar {
                log_mag: self.log_mag.clone() + Float::with_val(prec, j).ln(),
                phase: self.phase.clone(),
                exact: None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: LogPolar,
    pub rows_used: usize,
    /// Upper bound on `|log f − log f_N|`.
    pub tail_bound: Float,
    pub valid: bool,
}

/// `(log|1 − e^s|, arg(1 − e^s))` for `s = x + iy`.
fn log_one_minus_exp(x: &Float, y: &Float) -> (Float, Float) {
    let prec = x.prec().max(y.prec());
    if *x < KERNEL_SMALL {
        small_branch(x, y, prec)
    } else if *x > KERNEL_LARGE {
        let nx = Float::with_val(prec, -x);
        let ny = Float::with_val(prec, -y);
        let (re, im) = small_branch(&nx, &ny, prec);
        let pi = Float::with_val(prec, Constant::Pi);
        (
            Float::with_val(prec, x + &re),
            normalize_phase(Float::with_val(prec, y + &im) + pi),
        )
    } else {
        let em1 = Float::with_val(prec, x.exp_m1_ref());
        let half_y = Float::with_val(prec, y / 2u32);
        let s2 = Float::with_val(prec, half_y.sin_ref()).square();
        let re_w = -(em1 * Float::with_val(prec, y.cos_ref())) + s2 * 2u32;
        let im_w = -(Float::with_val(prec, x.exp_ref()) * Float::with_val(prec, y.sin_ref()));
        let norm2 = Float::with_val(prec, re_w.square_ref()) + Float::with_val(prec, im_w.square_ref());
        let log_mag = norm2.ln() / 2u32;
        let arg = Float::with_val(prec, im_w.atan2_ref(&re_w));
        (log_mag, arg)
    }
}

/// `log(1 − e^s)` for `Re s` very negative.
fn small_branch(x: &Float, y: &Float, prec: u32) -> (Float, Float) {
    let ex = Float::with_val(prec, x.exp_ref());
    let u = -(ex.clone() * Float::with_val(prec, y.cos_ref()));
    let v = -(ex * Float::with_val(prec, y.sin_ref()));
    // |1 + u + iv|² − 1 = 2u + u² + v²
    let t = Float::with_val(prec, &u * 2u32)
        + Float::with_val(prec, u.square_ref())
        + Float::with_val(prec, v.square_ref());
    let log_mag = t.ln_1p() / 2u32;
    let one_u = Float::with_val(prec, &u + 1u32);
    let arg = Float::with_val(prec, v.atan2_ref(&one_u));
    (log_mag, arg)
}

/// `s = log(z/b)` for the zero `(log_r, turn)` of the schedule.
fn log_ratio(z: &LogPolar, log_r: &Rational, turn: &Rational, prec: u32) -> (Float, Float) {
    match &z.exact {
        Some(e) => {
            let dx = Rational::from(&e.log_r - log_r);
            let x = rational_float(&dx, prec) + Float::with_val(prec, rational_float(&e.ratio, prec).ln_ref());
            let y = turn_radians(&Rational::from(&e.turn - turn), prec);
            (x, y)
        }
        None => {
            let x = Float::with_val(prec, &z.log_mag - rational_float(log_r, prec));
            let y = normalize_phase(Float::with_val(prec, &z.phase - turn_radians(turn, prec)));
            (x, y)
        }
    }
}

fn is_exact_zero(z: &LogPolar, log_r: &Rational, turn: &Rational) -> bool {
    match &z.exact {
        Some(e) => e.ratio == 1 && e.log_r == *log_r && crate::exact::same_turn(&e.turn, turn),
        None => false,
    }
}

fn check_rows(schedule: &ZeroSchedule, rows: usize) -> Result<(), EvalError> {
    if rows > schedule.rings().len() {
        return Err(EvalError::RowsOutOfRange {
            rows,
            available: schedule.rings().len(),
        });
    }
    Ok(())
}

/// Upper bound on the remainder of `log f` past ring `rows` at `|z| = e^log_mag`.
fn tail_bound(schedule: &ZeroSchedule, log_mag: &Float, rows: usize, prec: u32) -> Float {
    if log_mag.is_infinite() && *log_mag < 0 {
        return Float::new(prec);
    }
    let lz = Interval {
        lo: Float::with_val_round(prec, log_mag, Round::Down).0,
        hi: Float::with_val_round(prec, log_mag, Round::Up).0,
    };
    let one = Interval::from_i64(1, prec);
    let term = |m: usize| -> Option<Interval> {
        let count = schedule.ring_count_bound(m);
        if count == 0 {
            return Some(Interval::from_i64(0, prec));
        }
        let q = lz
            .sub(&Interval::from_rational(&schedule.radii().log_radius(m), prec))
            .exp();
        if !q.certainly_lt(&one) {
            return None;
        }
        Some(Interval::from_i64(count as i64, prec).mul(&q).div(&one.sub(&q)))
    };
    let half = Interval::from_rational(&Rational::from((1, 2)), prec);
    let stored = schedule.rings().len().max(schedule.radii().len());
    let mut total = Interval::from_i64(0, prec);
    let mut m = rows + 1;
    loop {
        let Some(t) = term(m) else {
            return Float::with_val(prec, Special::Infinity);
        };
        if m > stored {
            if t.hi == 0 {
                break;
            }
            let next = term(m + 1).expect("later rings are farther out");
            if next.div(&t).certainly_lt(&half) {
                total = total.add(&t.mul(&Interval::from_i64(2, prec)));
                break;
            }
        }
        total = total.add(&t);
        m += 1;
        assert!(m < stored + 10_000, "tail bound did not settle");
    }
    total.hi
}

/// Whether the remainder bound applies at this truncation.
fn tail_hypothesis(schedule: &ZeroSchedule, log_mag: &Float, rows: usize) -> bool {
    if log_mag.is_infinite() && *log_mag < 0 {
        return true;
    }
    if rows < 3 {
        return schedule.rings().is_empty() && schedule.ring_count_bound(rows + 1) == 0;
    }
    let bound = rational_float(&schedule.radii().log_radius(rows - 2), log_mag.prec());
    *log_mag <= bound
}

/// `log f_N(z)` over the first `rows` rings with a certified remainder bound.
pub fn log_eval(schedule: &ZeroSchedule, z: &LogPolar, rows: usize) -> Result<EvalResult, EvalError> {
    check_rows(schedule, rows)?;
    let prec = z.prec();
    if z.is_zero() {
        return Ok(EvalResult {
            value: LogPolar::one(prec),
            rows_used: rows,
            tail_bound: Float::new(prec),
            valid: true,
        });
    }
    let mut log_mag = Float::new(prec);
    let mut phase = Float::new(prec);
    let mut hit_zero = false;
    for ring in &schedule.rings()[..rows] {
        for zero in &schedule.zeros()[ring.zeros.clone()] {
            if is_exact_zero(z, &zero.log_r, &zero.turn) {
                hit_zero = true;
                continue;
            }
            let (x, y) = log_ratio(z, &zero.log_r, &zero.turn, prec);
            let (re, im) = log_one_minus_exp(&x, &y);
            log_mag += re;
            phase += im;
        }
    }
    let tail = tail_bound(schedule, &z.log_mag, rows, prec);
    let valid = tail_hypothesis(schedule, &z.log_mag, rows) && tail.is_finite();
    let value = if hit_zero || (log_mag.is_infinite() && log_mag < 0) {
        LogPolar::zero(prec)
    } else {
        LogPolar::new(log_mag, phase)
    };
    Ok(EvalResult {
        value,
        rows_used: rows,
        tail_bound: tail,
        valid,
    })
}

/// `log f_N(j·z)`, a member of the dilation family.
pub fn family_eval(schedule: &ZeroSchedule, j: &Integer, z: &LogPolar, rows: usize) -> Result<EvalResult, EvalError> {
    log_eval(schedule, &z.scaled(j), rows)
}

/// [`log_eval`] over many points; order of results follows `points`.
pub fn eval_many(
    schedule: &ZeroSchedule,
    points: &[LogPolar],
    rows: usize,
    strategy: Strategy,
) -> Vec<Result<EvalResult, EvalError>> {
    par::map(strategy, points, |z| log_eval(schedule, z, rows))
}

/// Neumaier-compensated running sum.
struct Compensated {
    sum: Float,
    carry: Float,
}

impl Compensated {
    fn new(prec: u32) -> Self {
        Compensated {
            sum: Float::new(prec),
            carry: Float::new(prec),
        }
    }

    fn add(&mut self, x: Float) {
        let prec = self.sum.prec();
        let t = Float::with_val(prec, &self.sum + &x);
        if Float::with_val(prec, self.sum.abs_ref()) >= Float::with_val(prec, x.abs_ref()) {
            self.carry += Float::with_val(prec, &self.sum - &t) + x;
        } else {
            self.carry += Float::with_val(prec, &x - &t) + &self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> Float {
        self.sum + self.carry
    }
}

/// `f′/f(z) = Σ 1/(z − b_l)` over the first `rows` rings, as `(log|·|, arg)`.
/// No remainder bound is attached.
pub fn log_derivative(schedule: &ZeroSchedule, z: &LogPolar, rows: usize) -> Result<LogPolar, EvalError> {
    check_rows(schedule, rows)?;
    let prec = z.prec();
    let mut re = Compensated::new(prec);
    let mut im = Compensated::new(prec);
    let mut l = 0;
    for ring in &schedule.rings()[..rows] {
        for zero in &schedule.zeros()[ring.zeros.clone()] {
            l += 1;
            if is_exact_zero(z, &zero.log_r, &zero.turn) {
                return Err(EvalError::Pole(l));
            }
            let (a, b) = if z.is_zero() {
                // 1/(0 − b) = −1/b
                let m = Float::with_val(prec, (-rational_float(&zero.log_r, prec)).exp_ref());
                let th = turn_radians(&zero.turn, prec);
                (
                    -(m.clone() * Float::with_val(prec, th.cos_ref())),
                    m * Float::with_val(prec, th.sin_ref()),
                )
            } else {
                inverse_difference(z, &zero.log_r, &zero.turn, prec)
            };
            re.add(a);
            im.add(b);
        }
    }
    let (re, im) = (re.total(), im.total());
    if re.is_zero() && im.is_zero() {
        return Ok(LogPolar::zero(prec));
    }
    let norm2 = Float::with_val(prec, re.square_ref()) + Float::with_val(prec, im.square_ref());
    let log_mag = norm2.ln() / 2u32;
    let phase = Float::with_val(prec, im.atan2_ref(&re));
    Ok(LogPolar::new(log_mag, phase))
}

/// `1/(z − b) = e^{−log b}·1/(e^s − 1)` with `s = log(z/b)`.
fn inverse_difference(z: &LogPolar, log_r: &Rational, turn: &Rational, prec: u32) -> (Float, Float) {
    let (x, y) = log_ratio(z, log_r, turn, prec);
    // g = 1/(e^s − 1)
    let (g_re, g_im, extra) = if x > KERNEL_LARGE {
        // e^{−s}/(1 − e^{−s}); fold e^{−x} into the magnitude
        let nx = Float::with_val(prec, -&x);
        let ny = Float::with_val(prec, -&y);
        let (lm, arg) = small_branch(&nx, &ny, prec);
        let mag_log = Float::with_val(prec, &nx - &lm);
        let ang = Float::with_val(prec, &ny - &arg);
        (
            Float::with_val(prec, ang.cos_ref()),
            Float::with_val(prec, ang.sin_ref()),
            mag_log,
        )
    } else {
        let em1 = Float::with_val(prec, x.exp_m1_ref());
        let half_y = Float::with_val(prec, &y / 2u32);
        let s2 = Float::with_val(prec, half_y.sin_ref()).square();
        let d_re = em1 * Float::with_val(prec, y.cos_ref()) - s2 * 2u32;
        let d_im = Float::with_val(prec, x.exp_ref()) * Float::with_val(prec, y.sin_ref());
        let norm2 = Float::with_val(prec, d_re.square_ref()) + Float::with_val(prec, d_im.square_ref());
        (d_re / &norm2, -(d_im / norm2), Float::new(prec))
    };
    let mag = Float::with_val(prec, &extra - rational_float(log_r, prec)).exp();
    let th = turn_radians(turn, prec);
    let (c, s) = (Float::with_val(prec, th.cos_ref()), Float::with_val(prec, th.sin_ref()));
    // e^{−iθ}·g
    let re = Float::with_val(prec, &g_re * &c) + Float::with_val(prec, &g_im * &s);
    let im = Float::with_val(prec, &g_im * &c) - Float::with_val(prec, &g_re * &s);
    (re * &mag, im * mag)
}

/// `log(1 + e^{2t})`, overflow-safe.
fn log1p_exp2(t: &Float) -> Float {
    let prec = t.prec();
    let two_t = Float::with_val(prec, t * 2u32);
    if two_t > 0 {
        let e = Float::with_val(prec, (-two_t.clone()).exp_ref());
        two_t + e.ln_1p()
    } else {
        two_t.exp().ln_1p()
    }
}

/// `log f^#(w) = log|f′(w)| − log(1 + |f(w)|²)` at `w` (already dilated).
fn log_spherical_at(schedule: &ZeroSchedule, w: &LogPolar, rows: usize) -> Result<Float, EvalError> {
    let prec = w.prec();
    match log_derivative(schedule, w, rows) {
        Ok(d) => {
            let f = log_eval(schedule, w, rows)?;
            if d.is_zero() {
                return Ok(Float::with_val(prec, Special::NegInfinity));
            }
            let log_fp = Float::with_val(prec, &f.value.log_mag + &d.log_mag);
            Ok(log_fp - log1p_exp2(&f.value.log_mag))
        }
        Err(EvalError::Pole(l)) => {
            // simple zero: |f′(b)| = |∏_{m≠l}(1 − b/b_m)| / |b|
            let zero = &schedule.zeros()[l - 1];
            let mut acc = Float::new(prec);
            for (k, other) in schedule.zeros()[..schedule.rings()[rows - 1].zeros.end]
                .iter()
                .enumerate()
            {
                if k + 1 == l {
                    continue;
                }
                let (x, y) = log_ratio(w, &other.log_r, &other.turn, prec);
                acc += log_one_minus_exp(&x, &y).0;
            }
            Ok(acc - rational_float(&zero.log_r, prec))
        }
        Err(e) => Err(e),
    }
}

/// `f^#(w)` at `w = j·z`.
pub fn spherical_derivative(
    schedule: &ZeroSchedule,
    j: &Integer,
    z: &LogPolar,
    rows: usize,
) -> Result<Float, EvalError> {
    Ok(log_spherical_at(schedule, &z.scaled(j), rows)?.exp())
}

/// Spherical derivative of the family member `f_j(z) = f(jz)`:
/// `f_j^#(z) = j·f^#(jz)`. Returned as a logarithm.
pub fn family_log_spherical_derivative(
    schedule: &ZeroSchedule,
    j: &Integer,
    z: &LogPolar,
    rows: usize,
) -> Result<Float, EvalError> {
    let prec = z.prec();
    Ok(log_spherical_at(schedule, &z.scaled(j), rows)? + Float::with_val(prec, j).ln())
}

/// Enclosure of `∏_{j≥1}(1 − 2^−j) ≈ 0.288788`.
pub fn k0_enclosure(prec: u32) -> Interval {
    let terms = prec + 8;
    let mut p = Interval::from_i64(1, prec);
    for j in 1..=terms {
        let f = Rational::from(1) - Rational::from((Integer::from(1), pow2(j)));
        p = p.mul(&Interval::from_rational(&f, prec));
    }
    // ∏_{j>J}(1 − 2^−j) ≥ 1 − 2^−J
    let rest = Rational::from(1) - Rational::from((Integer::from(1), pow2(terms)));
    let lower = p.mul(&Interval::from_rational(&rest, prec));
    Interval { lo: lower.lo, hi: p.hi }
}

/// Outcome of [`sector_bound_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBoundReport {
    /// `n` with `a_n < |z| ≤ a_(n+1)`.
    pub n: usize,
    /// `log|f_N(z)| − tail`: a lower bound for `log|f(z)|`.
    pub lhs: Float,
    pub rhs: Float,
    pub tail_bound: Float,
    pub pass: bool,
}

impl SectorBoundReport {
    pub fn margin(&self) -> Float {
        Float::with_val(self.lhs.prec(), &self.lhs - &self.rhs)
    }
}

/// `(n(n−1)/2)·log 2 + 3(n+1)·log sin(α₀/2) + log k₀`, rounded down.
pub fn sector_lower_bound(n: usize, alpha0: &Rational, prec: u32) -> Float {
    let ln2 = Interval::from_i64(2, prec).ln();
    let a = ln2.mul(&Interval::from_i64((n * (n.saturating_sub(1)) / 2) as i64, prec));
    let half = Interval::from_rational(&Rational::from(alpha0 / 2u32), prec);
    let b = half
        .sin_increasing()
        .ln()
        .mul(&Interval::from_i64(3 * (n as i64 + 1), prec));
    let k0 = k0_enclosure(prec).ln();
    a.add(&b).add(&k0).lo
}

/// Checks `log|f(z)| ≥ sector_lower_bound(n, α₀)` where `a_n < |z| ≤
/// a_(n+1)`, using every stored ring and subtracting the remainder bound.
/// `alpha0` is in radians; the direction of `z` must keep that gap from
/// every arc carrying zeros.
pub fn sector_bound_check(
    schedule: &ZeroSchedule,
    z: &LogPolar,
    alpha0: &Rational,
) -> Result<SectorBoundReport, EvalError> {
    let prec = z.prec();
    let turn = match &z.exact {
        Some(e) => e.turn.clone(),
        None => {
            let t = Float::with_val(prec, &z.phase / two_pi(prec));
            t.to_rational().expect("finite phase")
        }
    };
    let tau = two_pi(prec);
    for src in schedule.sources() {
        let gap_turns = src.arc.gap_to(&turn);
        let gap = Float::with_val(prec, &tau * rational_float(&gap_turns, prec));
        if gap < rational_float(alpha0, prec) {
            return Err(EvalError::TooCloseToRay {
                ray: src.arc.center().to_string(),
                gap: gap.to_f64(),
                required: alpha0.to_f64(),
            });
        }
    }
    for zero in schedule.zeros() {
        let d = crate::exact::circular_distance(&turn, &zero.turn);
        let gap = Float::with_val(prec, &tau * rational_float(&d, prec));
        if gap < rational_float(alpha0, prec) {
            return Err(EvalError::TooCloseToRay {
                ray: zero.turn.to_string(),
                gap: gap.to_f64(),
                required: alpha0.to_f64(),
            });
        }
    }
    let below = |n: usize| -> Ordering {
        match &z.exact {
            Some(e) if e.ratio == 1 => e.log_r.cmp(&schedule.radii().log_radius(n)),
            _ => z
                .log_mag
                .partial_cmp(&rational_float(&schedule.radii().log_radius(n), prec))
                .expect("finite modulus"),
        }
    };
    if below(1) != Ordering::Greater {
        return Err(EvalError::InsideFirstRing);
    }
    let rows = schedule.rings().len();
    let mut n = 1;
    while below(n + 1) == Ordering::Greater {
        n += 1;
        if n + 1 > rows {
            return Err(EvalError::OutsideTruncation);
        }
    }
    let eval = log_eval(schedule, z, rows)?;
    if !eval.valid {
        return Err(EvalError::OutsideTruncation);
    }
    let mut lhs = Float::with_val(prec, &eval.value.log_mag - &eval.tail_bound);
    lhs.assign_round(&eval.value.log_mag - &eval.tail_bound, Round::Down);
    let rhs = sector_lower_bound(n, alpha0, prec);
    Ok(SectorBoundReport {
        n,
        pass: lhs >= rhs,
        lhs,
        rhs,
        tail_bound: eval.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;
    use crate::pointset::Arc;
    use crate::schedule::{build_finite_schedule, RadiiSequence};

    const P: u32 = 200;

    fn q(s: &str) -> Rational {
        crate::exact::parse_rational(s).unwrap()
    }

    fn sched() -> ZeroSchedule {
        let host = Arc::new(q("1/8"), q("1/32")).unwrap();
        build_finite_schedule(&Ordinal::finite(3), 1, &host, 12).unwrap()
    }

    fn f64_of(x: &Float) -> f64 {
        x.to_f64()
    }

    #[test]
    fn value_at_origin() {
        let r = log_eval(&sched(), &LogPolar::zero(P), 8).unwrap();
        assert_eq!(f64_of(&r.value.log_mag), 0.0);
        assert_eq!(f64_of(&r.value.phase), 0.0);
    }

    #[test]
    fn exact_zero_hit() {
        let s = sched();
        let b1 = &s.zeros()[0];
        let z = LogPolar::from_log_turn(b1.log_r.clone(), b1.turn.clone(), P);
        assert!(log_eval(&s, &z, 12).unwrap().value.is_zero());
        // f_j(b/j) = 0
        let j = Integer::from(5962);
        let zj = LogPolar::exact(
            b1.log_r.clone(),
            Rational::from((Integer::from(1), j.clone())),
            b1.turn.clone(),
            P,
        );
        assert!(family_eval(&s, &j, &zj, 12).unwrap().value.is_zero());
        assert!(matches!(log_derivative(&s, &z, 12), Err(EvalError::Pole(1))));
    }

    #[test]
    fn kernel_matches_direct_product() {
        // two zeros, moderate modulus: compare with f64 complex arithmetic
        let radii = RadiiSequence::fibonacci(4).unwrap();
        let s = ZeroSchedule::from_zeros(radii, vec![(1, q("1/8")), (2, q("3/4"))]).unwrap();
        let z = LogPolar::from_log_turn(q("3/2"), q("1/5"), P);
        let r = log_eval(&s, &z, 2).unwrap();
        let zc = (1.5f64.exp(), 0.2 * std::f64::consts::TAU);
        let mut re_log = 0.0;
        for (lr, t) in [(1.0f64, 0.125f64), (2.0, 0.75)] {
            let w_re = zc.0 / lr.exp() * (zc.1 - t * std::f64::consts::TAU).cos();
            let w_im = zc.0 / lr.exp() * (zc.1 - t * std::f64::consts::TAU).sin();
            re_log += ((1.0 - w_re).powi(2) + w_im.powi(2)).sqrt().ln();
        }
        assert!((f64_of(&r.value.log_mag) - re_log).abs() < 1e-12);
    }

    #[test]
    fn kernel_branches_are_continuous() {
        for y in ["0.3", "2.0", "-1.1"] {
            let yv = Float::with_val(P, Float::parse(y).unwrap());
            for edge in [KERNEL_SMALL, KERNEL_LARGE] {
                let lo = Float::with_val(P, edge) - Float::with_val(P, 1e-30);
                let hi = Float::with_val(P, edge) + Float::with_val(P, 1e-30);
                let (a, pa) = log_one_minus_exp(&lo, &yv);
                let (b, pb) = log_one_minus_exp(&hi, &yv);
                assert!(f64_of(&Float::with_val(P, &a - &b)).abs() < 1e-20);
                assert!(f64_of(&Float::with_val(P, &pa - &pb)).abs() < 1e-20);
            }
        }
        // near s = 0: |1 − e^s| ≈ |s|
        let x = Float::with_val(P, 1e-40);
        let y = Float::with_val(P, 1e-40);
        let (m, _) = log_one_minus_exp(&x, &y);
        let expect = (2f64.sqrt() * 1e-40).ln();
        assert!((f64_of(&m) - expect).abs() < 1e-12);
    }

    #[test]
    fn truncation_within_tail() {
        let s = sched();
        let z = LogPolar::new(Float::with_val(P, 2.5), Float::with_val(P, Constant::Pi) / 5u32);
        let r8 = log_eval(&s, &z, 8).unwrap();
        let r12 = log_eval(&s, &z, 12).unwrap();
        assert!(r8.valid);
        let diff = Float::with_val(P, &r8.value.log_mag - &r12.value.log_mag).abs();
        assert!(diff <= r8.tail_bound);
        let far = LogPolar::from_log_turn(q("100"), q("0"), P);
        assert!(!log_eval(&s, &far, 8).unwrap().valid);
    }

    #[test]
    fn conjugate_symmetry() {
        let radii = RadiiSequence::fibonacci(4).unwrap();
        let s =
            ZeroSchedule::from_zeros(radii, vec![(1, q("1/8")), (1, q("7/8")), (2, q("1/3")), (2, q("2/3"))]).unwrap();
        let z = LogPolar::from_log_turn(q("7/4"), q("1/10"), P);
        let zb = LogPolar::from_log_turn(q("7/4"), q("9/10"), P);
        let a = log_eval(&s, &z, 2).unwrap().value;
        let b = log_eval(&s, &zb, 2).unwrap().value;
        assert!(f64_of(&Float::with_val(P, &a.log_mag - &b.log_mag)).abs() < 1e-50);
        assert!(f64_of(&Float::with_val(P, &a.phase + &b.phase)).abs() < 1e-50);
    }

    #[test]
    fn log_derivative_small_cases() {
        let radii = RadiiSequence::fibonacci(3).unwrap();
        let single = ZeroSchedule::from_zeros(radii.clone(), vec![(1, q("0"))]).unwrap();
        // b = e, z = 1: 1/(1 − e)
        let z = LogPolar::from_log_turn(q("0"), q("0"), P);
        let d = log_derivative(&single, &z, 1).unwrap();
        let expect = -(1f64.exp() - 1.0).ln();
        assert!((f64_of(&d.log_mag) - expect).abs() < 1e-12);
        let pair = ZeroSchedule::from_zeros(radii, vec![(1, q("0")), (1, q("1/2"))]).unwrap();
        // cancels up to the rounding of π in the second zero's direction
        let d = log_derivative(&pair, &LogPolar::zero(P), 1).unwrap();
        assert!(d.is_zero() || d.log_mag < -100);
    }

    #[test]
    fn spherical_derivative_cases() {
        let radii = RadiiSequence::fibonacci(3).unwrap();
        let empty = ZeroSchedule::empty(radii.clone());
        let z = LogPolar::from_log_turn(q("1"), q("1/7"), P);
        assert_eq!(spherical_derivative(&empty, &Integer::from(1), &z, 0).unwrap(), 0);
        // f(w) = 1 − w/e has f′ = −1/e everywhere
        let one = ZeroSchedule::from_zeros(radii, vec![(1, q("0"))]).unwrap();
        let at_zero = LogPolar::from_log_turn(q("1"), q("0"), P);
        let v = spherical_derivative(&one, &Integer::from(1), &at_zero, 1).unwrap();
        assert!((f64_of(&v) - (-1f64).exp()).abs() < 1e-15);

        // one zero per ring, all on the same ray
        let radii = RadiiSequence::fibonacci(8).unwrap();
        let sparse = ZeroSchedule::from_zeros(radii, (1..=8).map(|m| (m, q("1/8"))).collect()).unwrap();
        let b = &sparse.zeros()[2];
        let near = LogPolar::exact(b.log_r.clone(), q("1001/1000"), b.turn.clone(), P);
        let farther = LogPolar::exact(b.log_r.clone(), q("3/2"), b.turn.clone(), P);
        let one = Integer::from(1);
        let at_b = LogPolar::from_log_turn(b.log_r.clone(), b.turn.clone(), P);
        let exact = spherical_derivative(&sparse, &one, &at_b, 8).unwrap();
        let near_v = spherical_derivative(&sparse, &one, &near, 8).unwrap();
        assert!(near_v > spherical_derivative(&sparse, &one, &farther, 8).unwrap());
        let rel = Float::with_val(P, &near_v - &exact).abs() / &exact;
        assert!(rel < 1e-2);
    }

    #[test]
    fn k0_value() {
        let k = k0_enclosure(P);
        assert!(k.lo > 0.288788 && k.hi < 0.288789);
        assert!(k.lo <= k.hi);
    }

    #[test]
    fn sector_bound_cases() {
        let s = sched();
        let alpha0 = q("3/10");
        let z = LogPolar::from_log_turn(q("4"), q("5/8"), P);
        let rep = sector_bound_check(&s, &z, &alpha0).unwrap();
        assert_eq!(rep.n, 3);
        assert!(rep.pass, "margin {}", rep.margin());
        let inner = LogPolar::from_log_turn(q("1/2"), q("5/8"), P);
        assert_eq!(sector_bound_check(&s, &inner, &alpha0), Err(EvalError::InsideFirstRing));
        let on_ray = LogPolar::from_log_turn(q("4"), q("1/8"), P);
        assert!(matches!(
            sector_bound_check(&s, &on_ray, &alpha0),
            Err(EvalError::TooCloseToRay { .. })
        ));
    }
}
