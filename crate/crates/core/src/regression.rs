//! Regression reports: necessary relations among mae, mse, rmse and r2.
//!
//! All relations are folded into one feasible interval for the mean squared
//! error; the first relation that empties it is reported.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{ConsistencyResult, Evidence, Finding, Procedure, RegressionContext, ScoreReport, Uncertainty};
use crate::num::{self, Rational};
use crate::rint::{Ext, RationalInterval};

pub const REGRESSION_SCORES: [&str; 4] = ["mae", "mse", "rmse", "r2"];

fn nonnegative() -> RationalInterval {
    RationalInterval::at_least(Rational::zero())
}

fn at_most_one() -> RationalInterval {
    RationalInterval::from_ext(Ext::NegInf, Ext::Finite(num::int(1)))
}

/// Square of a nonnegative interval.
fn square(iv: &RationalInterval) -> RationalInterval {
    iv.mul(iv).intersect(&nonnegative())
}

fn violated(relation: &str, detail: String) -> Finding {
    Finding::RelationViolated {
        relation: relation.into(),
        detail,
    }
}

/// Decides a regression report. No count witness exists; the evidence holds
/// the feasible intervals instead.
pub fn check_regression(ctx: &RegressionContext, report: &ScoreReport, unc: &Uncertainty) -> Result<ConsistencyResult> {
    unc.validate()?;
    report.validate()?;
    for id in report.entries.keys() {
        if !REGRESSION_SCORES.contains(&id.as_str()) {
            return Err(Error::UnknownScoreId(id.clone()));
        }
    }
    if let Some(n) = ctx.n_samples {
        if n < 2 {
            return Err(Error::InvalidContext(format!("n_samples must be at least 2, got {n}")));
        }
    }
    let target = |id: &str| report.entries.get(id).map(|v| unc.target(id, &v.value));
    let mut evidence = Evidence::for_report(report, unc);
    if let Some(n) = ctx.n_samples {
        evidence.notes.push(format!("n_samples = {n} recorded, not used by the relations"));
    }
    let variance = match (&ctx.target_variance, report.entries.contains_key("r2")) {
        (None, true) => return Err(Error::MissingVariance),
        (Some(v), _) if !v.is_positive() => {
            return Err(Error::InvalidContext("target_variance must be positive".into()))
        }
        (v, _) => v.clone(),
    };
    let inconsistent = |f: Finding, evidence: Evidence| Ok(ConsistencyResult::inconsistent(Procedure::Regression, f, evidence));

    // R1: ranges
    let mut clipped = Vec::new();
    for id in REGRESSION_SCORES {
        let Some(t) = target(id) else { continue };
        let range = if id == "r2" { at_most_one() } else { nonnegative() };
        let c = t.intersect(&range);
        if c.is_empty() {
            return inconsistent(violated("range", format!("{id} interval {t} misses the range {range}")), evidence);
        }
        evidence.intervals.insert(id.to_string(), c.clone());
        clipped.push((id, c));
    }
    let get = |id: &str| clipped.iter().find(|(k, _)| *k == id).map(|(_, c)| c.clone());

    let mut mse = get("mse").unwrap_or_else(nonnegative);

    // R2: mae^2 <= mse
    if let Some(mae) = get("mae") {
        let lo = mae.bounds().map(|(l, _)| l * l).expect("nonempty");
        let next = mse.intersect(&RationalInterval::at_least(lo.clone()));
        if next.is_empty() {
            return inconsistent(
                violated("mae_squared_le_mse", format!("mae^2 >= {} exceeds every mse in {mse}", num::to_text(&lo))),
                evidence,
            );
        }
        mse = next;
    }
    // R3: rmse^2 = mse
    if let Some(rmse) = get("rmse") {
        let sq = square(&rmse);
        let next = mse.intersect(&sq);
        if next.is_empty() {
            return inconsistent(
                violated("rmse_squared_eq_mse", format!("rmse^2 in {sq} is disjoint from mse in {mse}")),
                evidence,
            );
        }
        mse = next;
    }
    // R4: mse = Var * (1 - r2)
    if let (Some(r2), Some(var)) = (get("r2"), &variance) {
        let one = RationalInterval::point(num::int(1));
        let implied = one.sub(&r2).mul(&RationalInterval::point(var.clone()));
        let next = mse.intersect(&implied);
        if next.is_empty() {
            return inconsistent(
                violated(
                    "r2_eq_one_minus_mse_over_variance",
                    format!("r2 implies mse in {implied}, disjoint from {mse}"),
                ),
                evidence,
            );
        }
        mse = next;
    }
    evidence.intervals.insert("mse_feasible".into(), mse);
    Ok(ConsistencyResult {
        inconsistency: false,
        procedure: Procedure::Regression,
        witness: None,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(pairs: &[(&str, &str)]) -> ScoreReport {
        ScoreReport::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn ctx(var: Option<i64>) -> RegressionContext {
        RegressionContext {
            n_samples: None,
            target_variance: var.map(num::int),
        }
    }

    #[test]
    fn worked_examples() {
        let unc = Uncertainty::decimals(4);
        let r = |p: &[(&str, &str)], v| check_regression(&ctx(v), &report(p), &unc).unwrap();
        assert!(!r(&[("mae", "0.0"), ("mse", "0.0"), ("r2", "1.0")], Some(4)).inconsistency);
        let res = r(&[("mae", "2.0"), ("mse", "1.0")], None);
        assert!(res.inconsistency);
        assert!(matches!(&res.evidence.finding, Some(Finding::RelationViolated { relation, .. }) if relation == "mae_squared_le_mse"));
        assert!(!r(&[("mse", "1.0"), ("r2", "0.75")], Some(4)).inconsistency);
        let res = r(&[("mse", "1.0"), ("r2", "0.8")], Some(4));
        assert!(matches!(&res.evidence.finding, Some(Finding::RelationViolated { relation, .. }) if relation == "r2_eq_one_minus_mse_over_variance"));
    }

    #[test]
    fn rmse_relation_and_ranges() {
        let unc = Uncertainty::decimals(2);
        assert!(!check_regression(&ctx(None), &report(&[("rmse", "1.5"), ("mse", "2.25")]), &unc).unwrap().inconsistency);
        assert!(check_regression(&ctx(None), &report(&[("rmse", "1.5"), ("mse", "2.5")]), &unc).unwrap().inconsistency);
        let res = check_regression(&ctx(None), &report(&[("mae", "-1.0")]), &unc).unwrap();
        assert!(matches!(&res.evidence.finding, Some(Finding::RelationViolated { relation, .. }) if relation == "range"));
        assert!(check_regression(&ctx(Some(1)), &report(&[("r2", "1.5")]), &unc).unwrap().inconsistency);
    }

    #[test]
    fn errors() {
        let unc = Uncertainty::decimals(2);
        assert_eq!(check_regression(&ctx(None), &report(&[("r2", "0.5")]), &unc), Err(Error::MissingVariance));
        assert!(matches!(check_regression(&ctx(None), &report(&[("acc", "0.5")]), &unc), Err(Error::UnknownScoreId(_))));
        assert!(matches!(check_regression(&ctx(Some(0)), &report(&[("r2", "0.5")]), &unc), Err(Error::InvalidContext(_))));
    }
}
