//! Closed intervals with MPFR endpoints and outward rounding.
//!
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so the true real result of the same expression on exact inputs is always
//! enclosed. This is what the certificates in the schedule and probe modules
//! are built on.

use std::cmp::Ordering;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Float,
    pub hi: Float,
}

fn down<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn min2(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn max2(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Interval {
            lo: down(prec, q),
            hi: up(prec, q),
        }
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Self {
        Interval {
            lo: down(prec, n),
            hi: up(prec, n),
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_integer(&Integer::from(n), prec)
    }

    pub fn pi(prec: u32) -> Self {
        Interval {
            lo: down(prec, Constant::Pi),
            hi: up(prec, Constant::Pi),
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: down(p, &self.lo + &o.lo),
            hi: up(p, &self.hi + &o.hi),
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: down(p, &self.lo - &o.hi),
            hi: up(p, &self.hi - &o.lo),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| down(p, *a * *b))
            .reduce(min2)
            .expect("four products");
        let hi = pairs
            .iter()
            .map(|(a, b)| up(p, *a * *b))
            .reduce(max2)
            .expect("four products");
        Interval { lo, hi }
    }

    /// Panics if the divisor straddles zero.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(!o.contains_zero(), "interval division by an interval containing 0");
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| down(p, *a / *b))
            .reduce(min2)
            .expect("four quotients");
        let hi = pairs
            .iter()
            .map(|(a, b)| up(p, *a / *b))
            .reduce(max2)
            .expect("four quotients");
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.exp_ref()),
            hi: up(p, self.hi.exp_ref()),
        }
    }

    /// Natural log; the interval must be strictly positive.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0, "logarithm of a non-positive interval");
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.ln_ref()),
            hi: up(p, self.hi.ln_ref()),
        }
    }

    pub fn sqrt(&self) -> Interval {
        assert!(self.lo >= 0, "square root of a negative interval");
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.sqrt_ref()),
            hi: up(p, self.hi.sqrt_ref()),
        }
    }

    /// `x^(1/k)` for a non-negative interval.
    pub fn root(&self, k: u32) -> Interval {
        assert!(self.lo >= 0, "root of a negative interval");
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.root_ref(k)),
            hi: up(p, self.hi.root_ref(k)),
        }
    }

    /// Sine, valid for intervals inside `[0, π/2]` where it is increasing.
    pub fn sin_increasing(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.sin_ref()),
            hi: up(p, self.hi.sin_ref()),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn certainly_lt(&self, o: &Interval) -> bool {
        self.hi < o.lo
    }

    pub fn certainly_gt(&self, o: &Interval) -> bool {
        self.lo > o.hi
    }

    /// `⌊x⌋` when both endpoints agree on it.
    pub fn floor_exact(&self) -> Option<Integer> {
        let a = self.lo.clone().floor().to_integer()?;
        let b = self.hi.clone().floor().to_integer()?;
        (a == b).then_some(a)
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational().expect("finite endpoint")
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational().expect("finite endpoint")
    }

    pub fn mid_f64(&self) -> f64 {
        let p = self.prec();
        let s = Float::with_val(p, &self.lo + &self.hi);
        (s / 2u32).to_f64()
    }
}

/// Computes `⌊value⌋` for a real given by an enclosure routine, doubling the
/// working precision until the enclosure pins the integer part.
pub fn certified_floor(start_prec: u32, mut enclose: impl FnMut(u32) -> Interval) -> Integer {
    let mut prec = start_prec.max(64);
    loop {
        if let Some(n) = enclose(prec).floor_exact() {
            return n;
        }
        prec = prec.checked_mul(2).expect("precision overflow in certified floor");
        assert!(prec <= 1 << 26, "value is too close to an integer to certify its floor");
    }
}
