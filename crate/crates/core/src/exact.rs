//! Exact rational helpers: angle arithmetic in turns and the `"p/q"` string
//! form used by every JSON and CSV surface.

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serializer};

/// Parses `"p/q"`, `"p"` or a short decimal such as `"0.5"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let whole: Integer = if int.is_empty() || int == "-" {
            Integer::new()
        } else {
            int.parse().ok()?
        };
        let digits: Integer = frac.parse().ok()?;
        let scale = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let frac_part = Rational::from((digits, scale));
        let mag = Rational::from(whole.abs()) + frac_part;
        return Some(if neg { -mag } else { mag });
    }
    s.parse::<Rational>().ok()
}

/// Reduces an angle given in turns to `[0, 1)`.
pub fn normalize_turn(t: &Rational) -> Rational {
    let floor = t.clone().floor();
    t - floor
}

/// Distance between two angles on the circle, in turns, in `[0, 1/2]`.
pub fn circular_distance(a: &Rational, b: &Rational) -> Rational {
    let d = normalize_turn(&Rational::from(a - b));
    let other = Rational::from(1 - &d);
    if d <= other {
        d
    } else {
        other
    }
}

pub fn same_turn(a: &Rational, b: &Rational) -> bool {
    normalize_turn(&Rational::from(a - b)) == 0
}

pub fn pow2(n: u32) -> Integer {
    Integer::from(1) << n
}

pub fn pow3(n: u32) -> Integer {
    Integer::from(Integer::u_pow_u(3, n))
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn de_rational<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid rational {s:?}")))
}
