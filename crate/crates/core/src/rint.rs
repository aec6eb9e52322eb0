//! Closed intervals with exact rational endpoints.
//!
//! Endpoints may be unbounded. `Empty` is a distinct value. Multiplication
//! follows the convention that a finite zero endpoint times an infinite one
//! contributes zero to the finite side while the infinite side stays open.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::num::{self, Rational};

/// An extended rational: a finite value or one of the two infinities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ext {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Ext {
    fn sign(&self) -> Ordering {
        match self {
            Ext::NegInf => Ordering::Less,
            Ext::PosInf => Ordering::Greater,
            Ext::Finite(q) => q.cmp(&Rational::zero()),
        }
    }

    fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Finite(q) => Ext::Finite(-q),
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Ext::Finite(q) => Some(q),
            _ => None,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::NegInf, Ext::NegInf) | (Ext::PosInf, Ext::PosInf) => Ordering::Equal,
            (Ext::NegInf, _) | (_, Ext::PosInf) => Ordering::Less,
            (_, Ext::NegInf) | (Ext::PosInf, _) => Ordering::Greater,
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "inf"),
            Ext::Finite(q) => write!(f, "{}", num::to_text(q)),
        }
    }
}

fn add_ext(a: &Ext, b: &Ext) -> Ext {
    match (a, b) {
        (Ext::Finite(x), Ext::Finite(y)) => Ext::Finite(x + y),
        (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
        _ => Ext::PosInf,
    }
}

/// Endpoint products. `0 * inf` yields the finite candidate 0 together with
/// the infinity, so callers see both.
fn mul_candidates(a: &Ext, b: &Ext, out: &mut Vec<Ext>) {
    match (a, b) {
        (Ext::Finite(x), Ext::Finite(y)) => out.push(Ext::Finite(x * y)),
        _ => {
            let (sa, sb) = (a.sign(), b.sign());
            if sa == Ordering::Equal || sb == Ordering::Equal {
                out.push(Ext::Finite(Rational::zero()));
                // zero meets infinity: the unbounded side keeps the infinity's direction
                let inf = if matches!(a, Ext::Finite(_)) { b } else { a };
                out.push(inf.clone());
            } else if (sa == Ordering::Less) ^ (sb == Ordering::Less) {
                out.push(Ext::NegInf);
            } else {
                out.push(Ext::PosInf);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalInterval {
    Empty,
    Range { lo: Ext, hi: Ext },
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Self::from_ext(Ext::Finite(lo), Ext::Finite(hi))
    }

    pub fn point(v: Rational) -> Self {
        Self::new(v.clone(), v)
    }

    pub fn from_ext(lo: Ext, hi: Ext) -> Self {
        if lo > hi || lo == Ext::PosInf || hi == Ext::NegInf {
            RationalInterval::Empty
        } else {
            RationalInterval::Range { lo, hi }
        }
    }

    pub fn at_least(lo: Rational) -> Self {
        Self::from_ext(Ext::Finite(lo), Ext::PosInf)
    }

    pub fn entire() -> Self {
        RationalInterval::Range {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
        }
    }

    /// `[center - radius, center + radius]`
    pub fn around(center: &Rational, radius: &Rational) -> Self {
        Self::new(center - radius, center + radius)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RationalInterval::Empty)
    }

    pub fn lo(&self) -> Option<&Ext> {
        match self {
            RationalInterval::Range { lo, .. } => Some(lo),
            RationalInterval::Empty => None,
        }
    }

    pub fn hi(&self) -> Option<&Ext> {
        match self {
            RationalInterval::Range { hi, .. } => Some(hi),
            RationalInterval::Empty => None,
        }
    }

    /// Finite endpoints, if both are finite.
    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        match self {
            RationalInterval::Range {
                lo: Ext::Finite(lo),
                hi: Ext::Finite(hi),
            } => Some((lo, hi)),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            RationalInterval::Empty => false,
            RationalInterval::Range { lo, hi } => {
                let x = Ext::Finite(x.clone());
                *lo <= x && x <= *hi
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (RationalInterval::Range { lo: a, hi: b }, RationalInterval::Range { lo: c, hi: d }) => {
                Self::from_ext(add_ext(a, c), add_ext(b, d))
            }
            _ => RationalInterval::Empty,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            RationalInterval::Range { lo, hi } => Self::from_ext(hi.neg(), lo.neg()),
            RationalInterval::Empty => RationalInterval::Empty,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (RationalInterval::Range { lo: a, hi: b }, RationalInterval::Range { lo: c, hi: d }) => {
                let mut cands = Vec::with_capacity(8);
                for x in [a, b] {
                    for y in [c, d] {
                        mul_candidates(x, y, &mut cands);
                    }
                }
                let lo = cands.iter().min().cloned().expect("nonempty");
                let hi = cands.iter().max().cloned().expect("nonempty");
                Self::from_ext(lo, hi)
            }
            _ => RationalInterval::Empty,
        }
    }

    /// Range of `1/x`; `None` when the interval is exactly `[0, 0]`.
    pub fn recip(&self) -> Option<Self> {
        let (lo, hi) = match self {
            RationalInterval::Empty => return Some(RationalInterval::Empty),
            RationalInterval::Range { lo, hi } => (lo, hi),
        };
        let inv = |e: &Ext| match e {
            Ext::Finite(q) => Ext::Finite(q.recip()),
            _ => Ext::Finite(Rational::zero()),
        };
        match (lo.sign(), hi.sign()) {
            (Ordering::Equal, Ordering::Equal) => None,
            (Ordering::Less, Ordering::Greater) => Some(Self::entire()),
            (Ordering::Equal, _) => Some(Self::from_ext(inv(hi), Ext::PosInf)),
            (_, Ordering::Equal) => Some(Self::from_ext(Ext::NegInf, inv(lo))),
            _ => Some(Self::from_ext(inv(hi), inv(lo))),
        }
    }

    /// Range of `a / b`; `None` (undefined) when `b` is exactly `[0, 0]`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if self.is_empty() {
            return Some(RationalInterval::Empty);
        }
        other.recip().map(|r| self.mul(&r))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        match (self, other) {
            (RationalInterval::Range { lo: a, hi: b }, RationalInterval::Range { lo: c, hi: d }) => {
                Self::from_ext(a.max(c).clone(), b.min(d).clone())
            }
            _ => RationalInterval::Empty,
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        match (self, other) {
            (RationalInterval::Empty, x) | (x, RationalInterval::Empty) => x.clone(),
            (RationalInterval::Range { lo: a, hi: b }, RationalInterval::Range { lo: c, hi: d }) => {
                Self::from_ext(a.min(c).clone(), b.max(d).clone())
            }
        }
    }

    /// The integers of this interval that also lie in `domain`.
    pub fn integer_clamp(&self, domain: IntRange) -> Option<IntRange> {
        let (lo, hi) = match self {
            RationalInterval::Empty => return None,
            RationalInterval::Range { lo, hi } => (lo, hi),
        };
        let lo = match lo {
            Ext::NegInf => domain.lo,
            Ext::PosInf => return None,
            Ext::Finite(q) => clamp_to_i64(num::ceil(q)).max(domain.lo),
        };
        let hi = match hi {
            Ext::PosInf => domain.hi,
            Ext::NegInf => return None,
            Ext::Finite(q) => clamp_to_i64(num::floor(q)).min(domain.hi),
        };
        IntRange::new(lo, hi)
    }
}

fn clamp_to_i64(v: BigInt) -> i64 {
    v.to_i64()
        .unwrap_or(if v.is_negative() { i64::MIN } else { i64::MAX })
}

/// JSON form: `["lo", "hi"]` with `"-inf"`/`"inf"` for unbounded ends, or
/// the string `"empty"`.
impl serde::Serialize for RationalInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        match self {
            RationalInterval::Empty => s.serialize_str("empty"),
            RationalInterval::Range { lo, hi } => {
                let mut t = s.serialize_tuple(2)?;
                t.serialize_element(&lo.to_string())?;
                t.serialize_element(&hi.to_string())?;
                t.end()
            }
        }
    }
}

impl<'de> serde::Deserialize<'de> for RationalInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        let end = |v: &serde_json::Value| -> Result<Ext, D::Error> {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(D::Error::custom(format!("bad interval end {other}"))),
            };
            match text.as_str() {
                "-inf" => Ok(Ext::NegInf),
                "inf" => Ok(Ext::PosInf),
                t => num::parse_rational(t).map(Ext::Finite).map_err(D::Error::custom),
            }
        };
        match &v {
            serde_json::Value::String(s) if s == "empty" => Ok(RationalInterval::Empty),
            serde_json::Value::Array(a) if a.len() == 2 => {
                Ok(RationalInterval::from_ext(end(&a[0])?, end(&a[1])?))
            }
            other => Err(D::Error::custom(format!("bad interval {other}"))),
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalInterval::Empty => write!(f, "empty"),
            RationalInterval::Range { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

/// A nonempty closed range of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(v: i64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo) as u64 + 1
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn intersect(&self, other: &IntRange) -> Option<IntRange> {
        IntRange::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn to_interval(self) -> RationalInterval {
        RationalInterval::new(num::int(self.lo), num::int(self.hi))
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use proptest::prelude::*;

    fn iv(a: i64, b: i64) -> RationalInterval {
        RationalInterval::new(int(a), int(b))
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(iv(1, 2).add(&iv(3, 4)), iv(4, 6));
        assert_eq!(iv(1, 2).mul(&iv(-1, 1)), iv(-2, 2));
        assert_eq!(iv(1, 2).sub(&iv(3, 4)), iv(-3, -1));
    }

    #[test]
    fn zero_times_unbounded() {
        let unbounded = RationalInterval::at_least(int(1));
        assert_eq!(iv(0, 0).mul(&unbounded), RationalInterval::at_least(int(0)));
    }

    #[test]
    fn division_examples() {
        assert_eq!(
            iv(1, 1).div(&iv(2, 4)),
            Some(RationalInterval::new(ratio(1, 4), ratio(1, 2)))
        );
        assert_eq!(iv(1, 2).div(&iv(0, 0)), None);
        assert_eq!(iv(1, 2).div(&iv(0, 4)), Some(RationalInterval::at_least(ratio(1, 4))));
        assert_eq!(iv(1, 2).div(&iv(-1, 4)), Some(RationalInterval::entire()));
        assert_eq!(
            iv(1, 2).div(&iv(-4, 0)),
            Some(RationalInterval::from_ext(Ext::NegInf, Ext::Finite(ratio(-1, 4))))
        );
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(iv(0, 2).intersect(&iv(1, 3)), iv(1, 2));
        assert_eq!(iv(0, 1).intersect(&iv(2, 3)), RationalInterval::Empty);
        assert_eq!(iv(0, 1).intersect(&iv(1, 2)), iv(1, 1));
        assert_ne!(RationalInterval::Empty, iv(0, 0));
    }

    #[test]
    fn integer_clamp_examples() {
        let dom = IntRange::new(0, 1000).unwrap();
        let a = RationalInterval::new(ratio(8099, 100), ratio(8101, 100));
        assert_eq!(a.integer_clamp(dom), Some(IntRange::point(81)));
        let b = RationalInterval::new(ratio(1, 5), ratio(4, 5));
        assert_eq!(b.integer_clamp(dom), None);
        let c = RationalInterval::new(ratio(-1, 2), ratio(5, 2));
        assert_eq!(c.integer_clamp(dom), IntRange::new(0, 2));
        let d = RationalInterval::at_least(ratio(999, 2));
        assert_eq!(d.integer_clamp(dom), IntRange::new(500, 1000));
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(a, b)| ratio(a, b))
    }

    fn interval() -> impl Strategy<Value = (RationalInterval, Rational)> {
        (rational(), rational(), 0i64..=8).prop_map(|(a, b, t)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            // a point inside: lo + t/8 (hi - lo)
            let x = &lo + (&hi - &lo) * ratio(t, 8);
            (RationalInterval::new(lo, hi), x)
        })
    }

    proptest! {
        #[test]
        fn containment((a, x) in interval(), (b, y) in interval()) {
            prop_assert!(a.add(&b).contains(&(&x + &y)));
            prop_assert!(a.sub(&b).contains(&(&x - &y)));
            prop_assert!(a.mul(&b).contains(&(&x * &y)));
            if !y.is_zero() {
                match a.div(&b) {
                    Some(q) => prop_assert!(q.contains(&(&x / &y))),
                    None => prop_assert!(false, "defined point in undefined division"),
                }
            }
        }

        #[test]
        fn monotone_ops_are_exact((a, _x) in interval(), (b, _y) in interval()) {
            let (alo, ahi) = a.bounds().unwrap();
            let (blo, bhi) = b.bounds().unwrap();
            prop_assert_eq!(a.add(&b), RationalInterval::new(alo + blo, ahi + bhi));
            let ends = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
            let lo = ends.iter().min().unwrap().clone();
            let hi = ends.iter().max().unwrap().clone();
            prop_assert_eq!(a.mul(&b), RationalInterval::new(lo, hi));
        }

        #[test]
        fn intersect_laws((a, _) in interval(), (b, _) in interval(), (c, _) in interval()) {
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
            prop_assert_eq!(a.intersect(&a), a.clone());
        }

        #[test]
        fn clamp_keeps_exactly_the_integers((a, _) in interval()) {
            let dom = IntRange::new(-100, 100).unwrap();
            let clamped = a.integer_clamp(dom);
            for v in -100i64..=100 {
                let inside = a.contains(&int(v));
                prop_assert_eq!(inside, clamped.map_or(false, |r| r.contains(v)));
            }
        }
    }
}
