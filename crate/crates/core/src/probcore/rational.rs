//! Exact rational values and the conversions used at the float boundary.

use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A probability held as an exact rational in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(Rational);

impl Prob {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value > Rational::one() {
            return Err(Error::InvalidDistribution(format!(
                "probability {} outside [0, 1]",
                fmt_rational(&value)
            )));
        }
        Ok(Prob(value))
    }

    pub fn zero() -> Self {
        Prob(Rational::zero())
    }

    pub fn one() -> Self {
        Prob(Rational::one())
    }

    /// `num / den`; panics if `den == 0` or `num > den`.
    pub fn from_ratio(num: u128, den: u128) -> Self {
        assert!(den > 0 && num <= den, "invalid probability {num}/{den}");
        Prob(ratio_u128(num, den))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&fmt_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let r = parse_rational(&s).map_err(serde::de::Error::custom)?;
        Prob::new(r).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Prob {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Prob::new(parse_rational(s)?)
    }
}

/// Information in natural units. May be `+inf`, never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(pub f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);
    pub const INFINITY: Nats = Nats(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

pub fn ratio_u128(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_i64(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Always `num/den`, including integers (`1/1`), so CSV columns are uniform.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b`, a bare integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((a, b)) = s.split_once('/') {
        let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if b.is_zero() {
            return Err(Error::Parse(format!("`{s}` has a zero denominator")));
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10u32), frac.len());
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        // Extremely large or small magnitudes: go through logarithms.
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        let l = ln_biguint(&r.numer().abs().to_biguint().unwrap())
            - ln_biguint(&r.denom().to_biguint().unwrap());
        sign * l.exp()
    })
}

/// Natural log of a positive big integer without overflowing through f64.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(r: &Rational) -> f64 {
    assert!(r.is_positive(), "ln of a non-positive rational");
    ln_biguint(&r.numer().to_biguint().unwrap()) - ln_biguint(&r.denom().to_biguint().unwrap())
}

/// `ln((a*b)/(c*d))` for positive integers. Returns exactly `0.0` when the
/// ratio is exactly one, so independence shows up as an exact zero.
pub fn ln_ratio(a: u128, b: u128, c: u128, d: u128) -> f64 {
    debug_assert!(a > 0 && b > 0 && c > 0 && d > 0);
    match (a.checked_mul(b), c.checked_mul(d)) {
        (Some(x), Some(y)) => {
            if x == y {
                0.0
            } else if x < (1u128 << 100) && y < (1u128 << 100) {
                (x as f64 / y as f64).ln()
            } else {
                ln_biguint(&BigUint::from(x)) - ln_biguint(&BigUint::from(y))
            }
        }
        _ => {
            let x = BigUint::from(a) * BigUint::from(b);
            let y = BigUint::from(c) * BigUint::from(d);
            if x == y {
                0.0
            } else {
                ln_biguint(&x) - ln_biguint(&y)
            }
        }
    }
}

pub fn checked_lcm(a: u128, b: u128) -> Result<u128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(Error::Overflow("taking a common denominator"))
}

/// Numerator and denominator of a non-negative rational as `u128`.
pub fn to_u128_parts(r: &Rational) -> Result<(u128, u128)> {
    if r.is_negative() {
        return Err(Error::InvalidDistribution(format!(
            "negative mass {}",
            fmt_rational(r)
        )));
    }
    let n = r.numer().to_u128().ok_or(Error::Overflow("converting a numerator"))?;
    let d = r.denom().to_u128().ok_or(Error::Overflow("converting a denominator"))?;
    Ok((n, d))
}

/// Serde adapter for `Rational` fields: `"num/den"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Like [`serde_rational`] for optional fields; `None` is `null`.
pub mod serde_option_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
