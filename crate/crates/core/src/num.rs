//! Exact rational numbers: parsing from decimal text, formatting, and the
//! serde representation used in every JSON document.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn pow10(exp: i64) -> Rational {
    let base = BigInt::from(10u32).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// A decimal numeral split into its exact value and the decimal exponent of
/// its last significant digit (`0.8464` has exponent -4, `12` has 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    pub value: Rational,
    pub last_digit_exponent: i64,
}

pub fn parse_decimal(text: &str) -> Result<Decimal> {
    let bad = || Error::Parse(format!("'{text}' is not a decimal numeral"));
    let s = text.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numerator: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| bad())?
    };
    if negative {
        numerator = -numerator;
    }
    let last_digit_exponent = exponent - frac_part.len() as i64;
    let value = Rational::from_integer(numerator) * pow10(last_digit_exponent);
    Ok(Decimal {
        value,
        last_digit_exponent,
    })
}

/// Parses a decimal numeral (`0.25`, `1e-4`) or a fraction (`1/4`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in '{text}'")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in '{text}'")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{text}'")));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).map(|d| d.value)
}

/// Canonical text form: `a` for integers, `a/b` otherwise.
pub fn to_text(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil(q: &Rational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// Floor of the square root of a nonnegative rational.
pub fn floor_sqrt(q: &Rational) -> BigInt {
    debug_assert!(!q.is_negative());
    floor(q).sqrt()
}

/// The exact square root of a nonnegative rational, when it is rational.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Rational bounds `lo <= sqrt(q) <= hi` with `hi - lo <= 2^-bits`; exact for
/// perfect squares.
pub fn sqrt_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = q * Rational::from_integer(scale);
    let root = floor_sqrt(&scaled);
    let unit = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
    let lo = Rational::from_integer(root.clone()) * &unit;
    if &lo * &lo == *q {
        return (lo.clone(), lo);
    }
    let hi = Rational::from_integer(root + 1) * unit;
    (lo, hi)
}

pub mod serde_rational {
    //! Serializes rationals as canonical strings; accepts strings or JSON numbers.
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_text(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(de::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_rational(&text).map_err(de::Error::custom)
    }
}

pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        q: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&to_text(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<serde_json::Value>::deserialize(d)?;
        match v {
            None | Some(serde_json::Value::Null) => Ok(None),
            Some(serde_json::Value::String(s)) => parse_rational(&s).map(Some).map_err(de::Error::custom),
            Some(serde_json::Value::Number(n)) => {
                parse_rational(&n.to_string()).map(Some).map_err(de::Error::custom)
            }
            Some(other) => Err(de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

pub mod serde_rational_map {
    use super::*;
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &to_text(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<String, Rational>, D::Error> {
        let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => {
                        return Err(de::Error::custom(format!("expected rational for '{k}', got {other}")))
                    }
                };
                parse_rational(&text).map(|q| (k, q)).map_err(de::Error::custom)
            })
            .collect()
    }
}
