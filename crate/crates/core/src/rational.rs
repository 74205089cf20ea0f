//! Exact rational arithmetic on i128 with checked operations.
//!
//! Every quantity the library reasons about (distances, costs, bounds) is a
//! `Rat`. Overflow is a hard error with context, never a silent wraparound;
//! at the instance sizes this crate targets the i128 range is far from
//! exhausted, so a panic here always indicates a real problem.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128, // always > 0, gcd(num, den) == 1
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

macro_rules! checked {
    ($e:expr, $what:expr) => {
        match $e {
            Some(v) => v,
            None => panic!("rational arithmetic overflow in {}", $what),
        }
    };
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        if g == 0 {
            return Rat { num: 0, den: 1 };
        }
        Rat {
            num: checked!(num.checked_div(g).and_then(|n| n.checked_mul(sign)), "new"),
            den: (den / g) * sign,
        }
    }

    pub fn int(n: i64) -> Rat {
        Rat { num: n as i128, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn abs(&self) -> Rat {
        Rat { num: checked!(self.num.checked_abs(), "abs"), den: self.den }
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other { self } else { other }
    }

    /// Integer power with non-negative exponent.
    pub fn pow(&self, e: u32) -> Rat {
        let mut out = Rat::ONE;
        for _ in 0..e {
            out = out * *self;
        }
        out
    }

    /// Largest integer n with n <= self.
    pub fn floor(&self) -> i128 {
        if self.num >= 0 {
            self.num / self.den
        } else {
            -((-self.num + self.den - 1) / self.den)
        }
    }

    /// Smallest integer n with n >= self.
    pub fn ceil(&self) -> i128 {
        -(-*self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Decimal rendering for reports; exact when the denominator divides a
    /// power of ten within `digits`, otherwise annotated as approximate.
    pub fn decimal(&self, digits: u32) -> String {
        let mut scale: i128 = 1;
        for _ in 0..digits {
            scale = checked!(scale.checked_mul(10), "decimal");
        }
        let scaled = checked!(self.num.checked_mul(scale), "decimal");
        let q = scaled / self.den;
        let exact = scaled % self.den == 0;
        let sign = if q < 0 { "-" } else { "" };
        let q = q.abs();
        let (int_part, frac_part) = (q / scale, q % scale);
        let mut s = format!("{sign}{int_part}.{frac_part:0width$}", width = digits as usize);
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
        if !exact {
            s.push('~');
        }
        s
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        let g = gcd(self.den, rhs.den);
        let l = checked!(self.den.checked_mul(rhs.den / g), "add");
        let a = checked!(self.num.checked_mul(l / self.den), "add");
        let b = checked!(rhs.num.checked_mul(l / rhs.den), "add");
        Rat::new(checked!(a.checked_add(b), "add"), l)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        self + (-rhs)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        // cross-reduce first to keep intermediates small
        let g1 = gcd(self.num, rhs.den);
        let g2 = gcd(rhs.num, self.den);
        let n = checked!((self.num / g1).checked_mul(rhs.num / g2), "mul");
        let d = checked!((self.den / g2).checked_mul(rhs.den / g1), "mul");
        Rat::new(n, d)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "rational division by zero");
        self * Rat { num: rhs.den * rhs.num.signum(), den: rhs.num.abs() }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: checked!(self.num.checked_neg(), "neg"), den: self.den }
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        *self = *self - rhs;
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        let a = checked!(self.num.checked_mul(other.den), "cmp");
        let b = checked!(other.num.checked_mul(self.den), "cmp");
        a.cmp(&b)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = String;
    fn from_str(s: &str) -> Result<Rat, String> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
            let d: i128 = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Ok(Rat::new(n, d))
        } else if let Some((i, frac)) = s.split_once('.') {
            let neg = i.trim_start().starts_with('-');
            let i: i128 = i.trim().parse().map_err(|e| format!("bad number {s:?}: {e}"))?;
            let mut den: i128 = 1;
            let mut num: i128 = 0;
            for c in frac.chars() {
                let d = c.to_digit(10).ok_or_else(|| format!("bad number {s:?}"))? as i128;
                num = num * 10 + d;
                den *= 10;
            }
            let frac = Rat::new(if neg { -num } else { num }, den);
            Ok(Rat::int(0) + Rat { num: i, den: 1 } + frac)
        } else {
            let n: i128 = s.parse().map_err(|e| format!("bad number {s:?}: {e}"))?;
            Ok(Rat { num: n, den: 1 })
        }
    }
}

// JSON form: integers serialize as plain numbers, everything else as
// {"num": .., "den": ..}. Deserialization accepts both plus "a/b" strings.
impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        if self.den == 1 && self.num.abs() <= i64::MAX as i128 {
            ser.serialize_i64(self.num as i64)
        } else {
            let mut st = ser.serialize_struct("Rat", 2)?;
            st.serialize_field("num", &(self.num as i64))?;
            st.serialize_field("den", &(self.den as i64))?;
            st.end()
        }
    }
}

struct RatVisitor;

impl<'de> Visitor<'de> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer, a \"num/den\" string, or {\"num\":..,\"den\":..}")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat { num: v as i128, den: 1 })
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        v.parse().map_err(de::Error::custom)
    }

    fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> Result<Rat, A::Error> {
        let mut num: Option<i64> = None;
        let mut den: Option<i64> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "num" => num = Some(map.next_value()?),
                "den" => den = Some(map.next_value()?),
                other => return Err(de::Error::unknown_field(other, &["num", "den"])),
            }
        }
        let num = num.ok_or_else(|| de::Error::missing_field("num"))?;
        let den = den.unwrap_or(1);
        if den == 0 {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Rat::new(num as i128, den as i128))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        de.deserialize_any(RatVisitor)
    }
}

/// Sum of a slice without consuming it.
pub fn rat_sum<'a, I: IntoIterator<Item = &'a Rat>>(xs: I) -> Rat {
    xs.into_iter().fold(Rat::ZERO, |a, b| a + *b)
}
