//! Binary-classification scores as exact functions of the confusion counts.
//!
//! Every registered score is monotone (non-decreasing or non-increasing) in
//! each of `tp` and `tn` for fixed `p`, `n`. Bounds over a box of counts are
//! therefore read off two opposite corners; corners where the score is
//! undefined fall back to the score's theoretical range.

mod formula;
mod value;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use formula::{Env as FormulaEnv, Expr};
pub use value::ScoreValue;

use crate::error::{Error, Result};
use crate::num::{self, Rational};
use crate::rint::{Ext, IntRange, RationalInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreId {
    Acc,
    Err,
    Sens,
    Spec,
    Ppv,
    Npv,
    Fpr,
    Fnr,
    Fdr,
    For,
    F1,
    FBeta,
    Fm,
    Gm,
    Bacc,
    Bm,
    Mk,
    Mcc,
    Kappa,
    Ji,
    Lrp,
    Lrn,
}

impl ScoreId {
    pub const ALL: [ScoreId; 22] = [
        ScoreId::Acc,
        ScoreId::Err,
        ScoreId::Sens,
        ScoreId::Spec,
        ScoreId::Ppv,
        ScoreId::Npv,
        ScoreId::Fpr,
        ScoreId::Fnr,
        ScoreId::Fdr,
        ScoreId::For,
        ScoreId::F1,
        ScoreId::FBeta,
        ScoreId::Fm,
        ScoreId::Gm,
        ScoreId::Bacc,
        ScoreId::Bm,
        ScoreId::Mk,
        ScoreId::Mcc,
        ScoreId::Kappa,
        ScoreId::Ji,
        ScoreId::Lrp,
        ScoreId::Lrn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreId::Acc => "acc",
            ScoreId::Err => "err",
            ScoreId::Sens => "sens",
            ScoreId::Spec => "spec",
            ScoreId::Ppv => "ppv",
            ScoreId::Npv => "npv",
            ScoreId::Fpr => "fpr",
            ScoreId::Fnr => "fnr",
            ScoreId::Fdr => "fdr",
            ScoreId::For => "for",
            ScoreId::F1 => "f1",
            ScoreId::FBeta => "fbeta",
            ScoreId::Fm => "fm",
            ScoreId::Gm => "gm",
            ScoreId::Bacc => "bacc",
            ScoreId::Bm => "bm",
            ScoreId::Mk => "mk",
            ScoreId::Mcc => "mcc",
            ScoreId::Kappa => "kappa",
            ScoreId::Ji => "ji",
            ScoreId::Lrp => "lrp",
            ScoreId::Lrn => "lrn",
        }
    }

    pub fn definition(self) -> &'static ScoreDefinition {
        registry()
            .iter()
            .find(|d| d.id == self)
            .expect("every score id is registered")
    }

    fn direction(self) -> Monotone {
        match self {
            ScoreId::Err | ScoreId::Fpr | ScoreId::Fnr | ScoreId::Fdr | ScoreId::For | ScoreId::Lrn => {
                Monotone::Decreasing
            }
            _ => Monotone::Increasing,
        }
    }

    /// Theoretical range; `None` as upper end means unbounded.
    pub fn range(self) -> (Rational, Option<Rational>) {
        match self {
            ScoreId::Bm | ScoreId::Mk | ScoreId::Mcc | ScoreId::Kappa => {
                (num::int(-1), Some(num::int(1)))
            }
            ScoreId::Lrp | ScoreId::Lrn => (num::int(0), None),
            _ => (num::int(0), Some(num::int(1))),
        }
    }

    pub fn range_interval(self) -> RationalInterval {
        let (lo, hi) = self.range();
        match hi {
            Some(hi) => RationalInterval::new(lo, hi),
            None => RationalInterval::at_least(lo),
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(
            self,
            ScoreId::Acc
                | ScoreId::Err
                | ScoreId::Sens
                | ScoreId::Spec
                | ScoreId::Fpr
                | ScoreId::Fnr
                | ScoreId::Bacc
                | ScoreId::Bm
        )
    }

    /// Scores undefined for every outcome of a testset lacking positives or
    /// negatives.
    fn needs_both_classes(self) -> (bool, bool) {
        match self {
            ScoreId::Sens | ScoreId::Fnr | ScoreId::Fm => (true, false),
            ScoreId::Spec | ScoreId::Fpr => (false, true),
            ScoreId::Bacc | ScoreId::Bm | ScoreId::Gm | ScoreId::Mcc | ScoreId::Lrp | ScoreId::Lrn => {
                (true, true)
            }
            _ => (false, false),
        }
    }
}

impl fmt::Display for ScoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScoreId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownScoreId(s.to_string()))
    }
}

impl Serialize for ScoreId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ScoreId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    Increasing,
    Decreasing,
}

/// One entry of the score registry data file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreDefinition {
    pub id: ScoreId,
    pub name: String,
    pub formula: String,
    pub range: (String, Option<String>),
    pub linear: bool,
    pub monotone: Monotone,
    pub default: bool,
}

impl ScoreDefinition {
    pub fn expr(&self) -> Expr {
        Expr::parse(&self.formula).expect("registry formulas parse")
    }
}

const REGISTRY_JSON: &str = include_str!("../../data/scores.json");

pub fn registry() -> &'static [ScoreDefinition] {
    static REGISTRY: OnceLock<Vec<ScoreDefinition>> = OnceLock::new();
    REGISTRY.get_or_init(|| serde_json::from_str(REGISTRY_JSON).expect("score registry parses"))
}

/// The scores enabled by default (listed by the CLI).
pub fn default_scores() -> impl Iterator<Item = &'static ScoreDefinition> {
    registry().iter().filter(|d| d.default)
}

/// Counts of one binary confusion matrix together with its testset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub p: u64,
    pub n: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, p: u64, n: u64) -> Option<Self> {
        (tp <= p && tn <= n).then_some(Self { tp, tn, p, n })
    }

    pub fn fp(&self) -> u64 {
        self.n - self.tn
    }

    pub fn fn_(&self) -> u64 {
        self.p - self.tp
    }
}

/// Affine form `a*tp + b*tn + c` of a linear score for fixed `p`, `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub tp: Rational,
    pub tn: Rational,
    pub constant: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineForm {
    Affine(Affine),
    /// The score is undefined for every outcome of this testset.
    Undefined,
    Nonlinear,
}

/// Lower or upper end of a score hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HullEnd {
    Value(ScoreValue),
    Unbounded,
}

/// Exact hull of a score over a box of counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreHull {
    pub lo: HullEnd,
    pub hi: HullEnd,
}

impl ScoreHull {
    pub fn intersects(&self, target: &RationalInterval) -> bool {
        let (tlo, thi) = match target {
            RationalInterval::Empty => return false,
            RationalInterval::Range { lo, hi } => (lo, hi),
        };
        let lo_ok = match &self.lo {
            HullEnd::Value(v) => v.cmp_ext(thi) != std::cmp::Ordering::Greater,
            HullEnd::Unbounded => true,
        };
        let hi_ok = match &self.hi {
            HullEnd::Value(v) => v.cmp_ext(tlo) != std::cmp::Ordering::Less,
            HullEnd::Unbounded => true,
        };
        lo_ok && hi_ok
    }
}

fn frac(num: i128, den: i128) -> Option<ScoreValue> {
    (den != 0).then(|| ScoreValue::Exact(Rational::new(num.into(), den.into())))
}

/// A score ready for evaluation, carrying its parameter (beta for F-beta).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scorer {
    pub id: ScoreId,
    pub beta: Rational,
}

impl Scorer {
    pub fn new(id: ScoreId) -> Self {
        Self {
            id,
            beta: Rational::one(),
        }
    }

    pub fn with_beta(id: ScoreId, beta: Rational) -> Self {
        Self { id, beta }
    }

    /// Exact value, or `None` where a denominator vanishes.
    pub fn evaluate(&self, c: ConfusionCounts) -> Option<ScoreValue> {
        let (tp, tn, p, n) = (c.tp as i128, c.tn as i128, c.p as i128, c.n as i128);
        let (fp, fn_) = (n - tn, p - tp);
        match self.id {
            ScoreId::Acc => frac(tp + tn, p + n),
            ScoreId::Err => frac(fp + fn_, p + n),
            ScoreId::Sens => frac(tp, p),
            ScoreId::Spec => frac(tn, n),
            ScoreId::Ppv => frac(tp, tp + fp),
            ScoreId::Npv => frac(tn, tn + fn_),
            ScoreId::Fpr => frac(fp, n),
            ScoreId::Fnr => frac(fn_, p),
            ScoreId::Fdr => frac(fp, tp + fp),
            ScoreId::For => frac(fn_, tn + fn_),
            ScoreId::F1 => frac(2 * tp, 2 * tp + fp + fn_),
            ScoreId::FBeta => {
                let b2 = &self.beta * &self.beta;
                let w = &b2 + Rational::one();
                let numer = &w * Rational::from_integer(tp.into());
                let denom = &numer
                    + &b2 * Rational::from_integer(fn_.into())
                    + Rational::from_integer(fp.into());
                (!denom.is_zero()).then(|| ScoreValue::Exact(numer / denom))
            }
            ScoreId::Fm => {
                let den = (tp + fp) * p;
                (den != 0).then(|| ScoreValue::root(false, Rational::new((tp * tp).into(), den.into())))
            }
            ScoreId::Gm => {
                let den = p * n;
                (den != 0).then(|| ScoreValue::root(false, Rational::new((tp * tn).into(), den.into())))
            }
            ScoreId::Bacc => frac(tp * n + tn * p, 2 * p * n),
            ScoreId::Bm => frac(tp * n + tn * p - p * n, p * n),
            ScoreId::Mk => {
                let (a, b) = (tp + fp, tn + fn_);
                if a == 0 || b == 0 {
                    return None;
                }
                frac(tp * b + tn * a - a * b, a * b)
            }
            ScoreId::Mcc => {
                let numer = num_bigint::BigInt::from(tp * tn - fp * fn_);
                let den = num_bigint::BigInt::from((tp + fp) * (tp + fn_))
                    * num_bigint::BigInt::from((tn + fp) * (tn + fn_));
                if den.is_zero() {
                    return None;
                }
                let negative = numer < num_bigint::BigInt::zero();
                Some(ScoreValue::root(negative, Rational::new(&numer * &numer, den)))
            }
            ScoreId::Kappa => frac(2 * (tp * tn - fn_ * fp), (tp + fp) * n + p * (fn_ + tn)),
            ScoreId::Ji => frac(tp, tp + fp + fn_),
            ScoreId::Lrp => frac(tp * n, p * fp),
            ScoreId::Lrn => frac(fn_ * n, p * tn),
        }
    }

    /// True when no outcome of a `(p, n)` testset gives this score a value.
    pub fn undefined_everywhere(&self, p: u64, n: u64) -> bool {
        let (needs_p, needs_n) = self.id.needs_both_classes();
        (needs_p && p == 0) || (needs_n && n == 0)
    }

    /// Exact hull over the box `tp_box x tn_box`; `None` when the box holds a
    /// single point at which the score is undefined.
    pub fn hull(&self, tp_box: IntRange, tn_box: IntRange, p: u64, n: u64) -> Option<ScoreHull> {
        let at = |tp: i64, tn: i64| self.evaluate(ConfusionCounts::new(tp as u64, tn as u64, p, n)?);
        if tp_box.is_point() && tn_box.is_point() {
            let v = at(tp_box.lo, tn_box.lo)?;
            return Some(ScoreHull {
                lo: HullEnd::Value(v.clone()),
                hi: HullEnd::Value(v),
            });
        }
        let (low_corner, high_corner) = match self.id.direction() {
            Monotone::Increasing => ((tp_box.lo, tn_box.lo), (tp_box.hi, tn_box.hi)),
            Monotone::Decreasing => ((tp_box.hi, tn_box.hi), (tp_box.lo, tn_box.lo)),
        };
        let (range_lo, range_hi) = self.id.range();
        let lo = at(low_corner.0, low_corner.1).unwrap_or(ScoreValue::Exact(range_lo));
        let hi = match at(high_corner.0, high_corner.1) {
            Some(v) => HullEnd::Value(v),
            None => range_hi.map_or(HullEnd::Unbounded, |h| HullEnd::Value(ScoreValue::Exact(h))),
        };
        Some(ScoreHull {
            lo: HullEnd::Value(lo),
            hi,
        })
    }

    /// An interval containing the score at every point of the box where it
    /// is defined. Irrational endpoints are rounded outward.
    pub fn evaluate_interval(&self, tp_box: IntRange, tn_box: IntRange, p: u64, n: u64) -> RationalInterval {
        let hull = match self.hull(tp_box, tn_box, p, n) {
            Some(h) => h,
            None => return RationalInterval::Empty,
        };
        let lo = match hull.lo {
            HullEnd::Value(v) => Ext::Finite(v.rational_bounds().0),
            HullEnd::Unbounded => Ext::NegInf,
        };
        let hi = match hull.hi {
            HullEnd::Value(v) => Ext::Finite(v.rational_bounds().1),
            HullEnd::Unbounded => Ext::PosInf,
        };
        RationalInterval::from_ext(lo, hi)
    }

    /// The tightest integer range of `tp` within `tp_box` containing every
    /// `tp` for which some `tn` in `tn_box` can put the score inside `target`.
    pub fn invert_tp(
        &self,
        target: &RationalInterval,
        tp_box: IntRange,
        tn_box: IntRange,
        p: u64,
        n: u64,
    ) -> Option<IntRange> {
        let hit = |r: IntRange| {
            self.hull(r, tn_box, p, n)
                .is_some_and(|h| h.intersects(target))
        };
        let lo = first_hit(tp_box, &hit)?;
        let hi = last_hit(IntRange { lo, hi: tp_box.hi }, &hit)?;
        Some(IntRange { lo, hi })
    }

    pub fn invert_tn(
        &self,
        target: &RationalInterval,
        tp_box: IntRange,
        tn_box: IntRange,
        p: u64,
        n: u64,
    ) -> Option<IntRange> {
        let hit = |r: IntRange| {
            self.hull(tp_box, r, p, n)
                .is_some_and(|h| h.intersects(target))
        };
        let lo = first_hit(tn_box, &hit)?;
        let hi = last_hit(IntRange { lo, hi: tn_box.hi }, &hit)?;
        Some(IntRange { lo, hi })
    }

    pub fn affine(&self, p: u64, n: u64) -> AffineForm {
        if !self.id.is_linear() {
            return AffineForm::Nonlinear;
        }
        if self.undefined_everywhere(p, n) || p + n == 0 {
            return AffineForm::Undefined;
        }
        let zero = Rational::zero;
        let inv = |d: u64| Rational::new(1.into(), (d as i64).into());
        let (a, b, c) = match self.id {
            ScoreId::Acc => (inv(p + n), inv(p + n), zero()),
            ScoreId::Err => (-inv(p + n), -inv(p + n), Rational::one()),
            ScoreId::Sens => (inv(p), zero(), zero()),
            ScoreId::Spec => (zero(), inv(n), zero()),
            ScoreId::Fpr => (zero(), -inv(n), Rational::one()),
            ScoreId::Fnr => (-inv(p), zero(), Rational::one()),
            ScoreId::Bacc => (inv(2 * p), inv(2 * n), zero()),
            ScoreId::Bm => (inv(p), inv(n), -Rational::one()),
            _ => unreachable!("nonlinear scores handled above"),
        };
        AffineForm::Affine(Affine {
            tp: a,
            tn: b,
            constant: c,
        })
    }
}

/// Smallest value of `range` whose singleton can hit, by bisection over
/// sound sub-range hulls.
fn first_hit(range: IntRange, hit: &impl Fn(IntRange) -> bool) -> Option<i64> {
    if !hit(range) {
        return None;
    }
    if range.is_point() {
        return Some(range.lo);
    }
    let mid = range.lo + (range.hi - range.lo) / 2;
    first_hit(IntRange { lo: range.lo, hi: mid }, hit)
        .or_else(|| first_hit(IntRange { lo: mid + 1, hi: range.hi }, hit))
}

fn last_hit(range: IntRange, hit: &impl Fn(IntRange) -> bool) -> Option<i64> {
    if !hit(range) {
        return None;
    }
    if range.is_point() {
        return Some(range.lo);
    }
    let mid = range.lo + (range.hi - range.lo) / 2;
    last_hit(IntRange { lo: mid + 1, hi: range.hi }, hit)
        .or_else(|| last_hit(IntRange { lo: range.lo, hi: mid }, hit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use proptest::prelude::*;

    fn counts(tp: u64, tn: u64, p: u64, n: u64) -> ConfusionCounts {
        ConfusionCounts::new(tp, tn, p, n).unwrap()
    }

    fn exact(q: Rational) -> Option<ScoreValue> {
        Some(ScoreValue::Exact(q))
    }

    #[test]
    fn worked_example_values() {
        let c = counts(81, 850, 100, 1000);
        assert_eq!(Scorer::new(ScoreId::Acc).evaluate(c), exact(ratio(931, 1100)));
        assert_eq!(Scorer::new(ScoreId::F1).evaluate(c), exact(ratio(162, 331)));
        assert_eq!(Scorer::new(ScoreId::Sens).evaluate(c), exact(ratio(81, 100)));
    }

    #[test]
    fn zero_numerators_and_denominators() {
        assert_eq!(Scorer::new(ScoreId::Sens).evaluate(counts(0, 3, 5, 7)), exact(int(0)));
        assert_eq!(Scorer::new(ScoreId::Ppv).evaluate(counts(0, 7, 5, 7)), None);
        assert_eq!(Scorer::new(ScoreId::Lrp).evaluate(counts(3, 7, 5, 7)), None);
        assert_eq!(Scorer::new(ScoreId::Mcc).evaluate(counts(5, 0, 5, 7)), None);
    }

    #[test]
    fn root_scores() {
        let c = counts(2, 1, 4, 2);
        // sqrt(1/2 * 1/2)
        assert_eq!(Scorer::new(ScoreId::Gm).evaluate(c), exact(ratio(1, 2)));
        let mcc = Scorer::new(ScoreId::Mcc).evaluate(counts(1, 1, 2, 2)).unwrap();
        assert_eq!(mcc, ScoreValue::Exact(int(0)));
        let mcc = Scorer::new(ScoreId::Mcc).evaluate(counts(0, 0, 2, 2)).unwrap();
        assert_eq!(mcc, ScoreValue::Exact(int(-1)));
    }

    #[test]
    fn fbeta_reduces_to_f1() {
        let c = counts(7, 3, 9, 11);
        assert_eq!(
            Scorer::with_beta(ScoreId::FBeta, int(1)).evaluate(c),
            Scorer::new(ScoreId::F1).evaluate(c)
        );
    }

    #[test]
    fn interval_examples() {
        let full_tp = IntRange::new(0, 100).unwrap();
        let full_tn = IntRange::new(0, 1000).unwrap();
        assert_eq!(
            Scorer::new(ScoreId::Sens).evaluate_interval(IntRange::new(80, 82).unwrap(), full_tn, 100, 1000),
            RationalInterval::new(ratio(4, 5), ratio(41, 50))
        );
        assert_eq!(
            Scorer::new(ScoreId::Acc).evaluate_interval(full_tp, full_tn, 100, 1000),
            RationalInterval::new(int(0), int(1))
        );
        assert_eq!(
            Scorer::new(ScoreId::F1).evaluate_interval(IntRange::point(81), IntRange::point(850), 100, 1000),
            RationalInterval::point(ratio(162, 331))
        );
    }

    #[test]
    fn inversion_examples() {
        let full_tp = IntRange::new(0, 100).unwrap();
        let full_tn = IntRange::new(0, 1000).unwrap();
        let target = RationalInterval::new(ratio(8099, 10000), ratio(8101, 10000));
        assert_eq!(
            Scorer::new(ScoreId::Sens).invert_tp(&target, full_tp, full_tn, 100, 1000),
            Some(IntRange::point(81))
        );
        assert_eq!(
            Scorer::new(ScoreId::Spec).invert_tp(&target, full_tp, full_tn, 100, 1000),
            Some(full_tp)
        );
        let acc_target = RationalInterval::new(ratio(8463, 10000), ratio(8465, 10000));
        assert_eq!(
            Scorer::new(ScoreId::Acc).invert_tp(&acc_target, full_tp, IntRange::point(850), 100, 1000),
            Some(IntRange::point(81))
        );
    }

    #[test]
    fn registry_agrees_with_code() {
        let defs = registry();
        assert_eq!(defs.len(), ScoreId::ALL.len());
        assert_eq!(default_scores().count(), 20);
        for d in defs {
            assert_eq!(d.linear, d.id.is_linear(), "{}", d.id);
            assert_eq!(d.monotone, d.id.direction(), "{}", d.id);
            let (lo, hi) = d.id.range();
            assert_eq!(num::parse_rational(&d.range.0).unwrap(), lo, "{}", d.id);
            assert_eq!(d.range.1.as_ref().map(|h| num::parse_rational(h).unwrap()), hi);
        }
    }

    /// The registry formula trees are an independent evaluation route.
    #[test]
    fn formulas_match_evaluators() {
        for d in registry() {
            let expr = d.expr();
            let scorer = Scorer::with_beta(d.id, ratio(3, 2));
            for p in 0..=6u64 {
                for n in 0..=6u64 {
                    for tp in 0..=p {
                        for tn in 0..=n {
                            let env = FormulaEnv {
                                tp: tp as f64,
                                tn: tn as f64,
                                p: p as f64,
                                n: n as f64,
                                beta: 1.5,
                            };
                            let exact = scorer.evaluate(counts(tp, tn, p, n));
                            let approx = expr.eval(&env);
                            match (exact, approx) {
                                (Some(e), Some(a)) => assert!(
                                    (e.to_f64() - a).abs() < 1e-9,
                                    "{} at {tp},{tn},{p},{n}: {} vs {a}",
                                    d.id,
                                    e.to_f64()
                                ),
                                (None, None) => {}
                                (e, a) => panic!("{} definedness differs at {tp},{tn},{p},{n}: {e:?} {a:?}", d.id),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn complements_are_exact() {
        for p in 0..=5u64 {
            for n in 0..=5u64 {
                for tp in 0..=p {
                    for tn in 0..=n {
                        let c = counts(tp, tn, p, n);
                        let pairs = [
                            (ScoreId::Acc, ScoreId::Err),
                            (ScoreId::Sens, ScoreId::Fnr),
                            (ScoreId::Spec, ScoreId::Fpr),
                            (ScoreId::Ppv, ScoreId::Fdr),
                            (ScoreId::Npv, ScoreId::For),
                        ];
                        for (a, b) in pairs {
                            let va = Scorer::new(a).evaluate(c);
                            let vb = Scorer::new(b).evaluate(c);
                            match (va, vb) {
                                (Some(ScoreValue::Exact(x)), Some(ScoreValue::Exact(y))) => {
                                    assert_eq!(x + y, int(1))
                                }
                                (None, None) => {}
                                other => panic!("{a}/{b}: {other:?}"),
                            }
                        }
                    }
                }
            }
        }
    }

    /// Every box of every small testset: hulls contain all defined values.
    #[test]
    fn hull_containment_exhaustive() {
        for id in ScoreId::ALL {
            let s = Scorer::with_beta(id, ratio(1, 2));
            for p in 0..=5i64 {
                for n in 0..=5i64 {
                    for a in 0..=p {
                        for b in a..=p {
                            for c in 0..=n {
                                for d in c..=n {
                                    let tpb = IntRange { lo: a, hi: b };
                                    let tnb = IntRange { lo: c, hi: d };
                                    let hull = s.hull(tpb, tnb, p as u64, n as u64);
                                    for tp in a..=b {
                                        for tn in c..=d {
                                            let v = s.evaluate(counts(tp as u64, tn as u64, p as u64, n as u64));
                                            if let Some(v) = v {
                                                let (lo, hi) = v.rational_bounds();
                                                let h = hull.as_ref().expect("defined point in empty hull");
                                                assert!(
                                                    h.intersects(&RationalInterval::new(lo, hi)),
                                                    "{id} {tpb} {tnb} p={p} n={n}"
                                                );
                                                assert!(v.within(&id.range_interval()));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn small_box() -> impl Strategy<Value = (u64, u64, IntRange, IntRange)> {
        (1u64..=30, 1u64..=30).prop_flat_map(|(p, n)| {
            (Just(p), Just(n), 0..=p as i64, 0..=p as i64, 0..=n as i64, 0..=n as i64).prop_map(
                |(p, n, a, b, c, d)| {
                    (
                        p,
                        n,
                        IntRange { lo: a.min(b), hi: a.max(b) },
                        IntRange { lo: c.min(d), hi: c.max(d) },
                    )
                },
            )
        })
    }

    fn score_id() -> impl Strategy<Value = ScoreId> {
        proptest::sample::select(ScoreId::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn interval_containment(id in score_id(), (p, n, tpb, tnb) in small_box()) {
            let s = Scorer::new(id);
            let iv = s.evaluate_interval(tpb, tnb, p, n);
            for tp in tpb.lo..=tpb.hi {
                for tn in tnb.lo..=tnb.hi {
                    if let Some(v) = s.evaluate(counts(tp as u64, tn as u64, p, n)) {
                        let (lo, hi) = v.rational_bounds();
                        prop_assert!(!iv.intersect(&RationalInterval::new(lo, hi)).is_empty());
                    }
                }
            }
        }

        #[test]
        fn inversion_soundness(
            id in score_id(),
            (p, n, tpb, tnb) in small_box(),
            center in 0i64..=100,
            width in 0i64..=10,
        ) {
            let s = Scorer::new(id);
            let target = RationalInterval::new(ratio(center - width, 100), ratio(center + width, 100));
            let tp_inv = s.invert_tp(&target, tpb, tnb, p, n);
            let tn_inv = s.invert_tn(&target, tpb, tnb, p, n);
            for tp in tpb.lo..=tpb.hi {
                for tn in tnb.lo..=tnb.hi {
                    if let Some(v) = s.evaluate(counts(tp as u64, tn as u64, p, n)) {
                        if v.within(&target) {
                            prop_assert!(tp_inv.is_some_and(|r| r.contains(tp)));
                            prop_assert!(tn_inv.is_some_and(|r| r.contains(tn)));
                        }
                    }
                }
            }
        }
    }
}
