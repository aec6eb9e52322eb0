use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;

use crate::num::{self, Rational};
use crate::rint::{Ext, RationalInterval};

/// An exact score value: a rational, or `±sqrt(q)` for the root-based scores
/// (geometric mean, Fowlkes-Mallows, MCC).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScoreValue {
    Exact(Rational),
    Root { negative: bool, square: Rational },
}

impl ScoreValue {
    pub fn root(negative: bool, square: Rational) -> Self {
        debug_assert!(!square.is_negative());
        match num::exact_sqrt(&square) {
            Some(r) => ScoreValue::Exact(if negative { -r } else { r }),
            None => ScoreValue::Root { negative, square },
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            ScoreValue::Exact(q) => q.cmp(r),
            ScoreValue::Root { negative: false, square } => {
                if r.is_negative() {
                    Ordering::Greater
                } else {
                    square.cmp(&(r * r))
                }
            }
            ScoreValue::Root { negative: true, square } => {
                if r.is_positive() {
                    Ordering::Less
                } else {
                    square.cmp(&(r * r)).reverse()
                }
            }
        }
    }

    pub fn cmp_ext(&self, e: &Ext) -> Ordering {
        match e {
            Ext::NegInf => Ordering::Greater,
            Ext::PosInf => Ordering::Less,
            Ext::Finite(q) => self.cmp_rational(q),
        }
    }

    pub fn within(&self, iv: &RationalInterval) -> bool {
        match iv {
            RationalInterval::Empty => false,
            RationalInterval::Range { lo, hi } => {
                self.cmp_ext(lo) != Ordering::Less && self.cmp_ext(hi) != Ordering::Greater
            }
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ScoreValue::Exact(q) => Some(q),
            ScoreValue::Root { .. } => None,
        }
    }

    /// Rational bounds around the value, exact for rationals.
    pub fn rational_bounds(&self) -> (Rational, Rational) {
        match self {
            ScoreValue::Exact(q) => (q.clone(), q.clone()),
            ScoreValue::Root { negative, square } => {
                let (lo, hi) = num::sqrt_bounds(square, 64);
                if *negative {
                    (-hi, -lo)
                } else {
                    (lo, hi)
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScoreValue::Exact(q) => num::to_f64(q),
            ScoreValue::Root { negative, square } => {
                let v = num::to_f64(square).sqrt();
                if *negative {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreValue::Exact(q) => write!(f, "{}", num::to_text(q)),
            ScoreValue::Root { negative, square } => {
                let sign = if *negative { "-" } else { "" };
                write!(f, "{sign}sqrt({})", num::to_text(square))
            }
        }
    }
}
