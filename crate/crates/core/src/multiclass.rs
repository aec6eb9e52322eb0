//! Multiclass tests through one-vs-rest reductions.
//!
//! Micro-averaging pools the per-class counts, leaving a single free
//! variable: the trace `t` of the confusion matrix. Macro-averaging couples
//! the classes through the off-diagonal entries, so it is decided over the
//! full matrix.

use crate::aggregate::{self, CheckOptions};
use crate::error::{Error, Result};
use crate::model::{
    Assignment, ConsistencyResult, Evidence, Finding, MulticlassTestset, Procedure, ScoreReport,
    Uncertainty, Witness,
};
use crate::scores::ConfusionCounts;
use crate::single::{achieved_evidence, static_finding};

/// Pooled one-vs-rest counts for trace `t`: TP = t, FN = FP = N - t,
/// over `p = N` positives and `n = N(C-1)` negatives.
pub fn micro_counts(m: &MulticlassTestset, t: u64) -> Option<ConfusionCounts> {
    let (nn, c) = (m.total(), m.classes() as u64);
    if t > nn || c < 2 {
        return None;
    }
    ConfusionCounts::new(t, nn * (c - 2) + t, nn, nn * (c - 1))
}

/// One-vs-rest counts of class `i` in `matrix` (`matrix[a][b]` = class-a
/// samples predicted as b).
pub fn macro_class_counts(matrix: &[Vec<u64>], i: usize) -> Option<ConfusionCounts> {
    let row_sum = |r: &Vec<u64>| r.iter().sum::<u64>();
    let total: u64 = matrix.iter().map(row_sum).sum();
    let ci = row_sum(matrix.get(i)?);
    let fp: u64 = matrix.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r[i]).sum();
    let n = total - ci;
    ConfusionCounts::new(matrix[i][i], n.checked_sub(fp)?, ci, n)
}

fn check_shape(m: &MulticlassTestset) -> Result<()> {
    if m.classes() < 2 {
        return Err(Error::InvalidTestset("fewer than two classes".into()));
    }
    if m.total() == 0 {
        return Err(Error::EmptyExperiment("testset has no samples".into()));
    }
    Ok(())
}

/// Micro-averaged scores: consistent iff some trace `t` in `[0, N]`
/// reproduces every score. The smallest such `t` is the witness.
pub fn check_multiclass_micro(
    m: &MulticlassTestset,
    report: &ScoreReport,
    unc: &Uncertainty,
) -> Result<ConsistencyResult> {
    check_shape(m)?;
    let constraints = report.constraints(unc)?;
    let mut evidence = Evidence::for_report(report, unc);
    let (nn, c) = (m.total(), m.classes() as u64);
    if let Some(f) = static_finding(&constraints, nn, nn * (c - 1)) {
        return Ok(ConsistencyResult::inconsistent(Procedure::MulticlassMicro, f, evidence));
    }
    for t in 0..=nn {
        let counts = micro_counts(m, t).expect("t within [0, N]");
        let ok = constraints
            .iter()
            .all(|c| c.scorer.evaluate(counts).is_some_and(|v| c.accepts(&v)));
        if ok {
            achieved_evidence(&mut evidence, &constraints, counts);
            return Ok(ConsistencyResult::consistent(
                Procedure::MulticlassMicro,
                Witness::Single(Assignment::Trace { trace: t }),
                evidence,
            ));
        }
    }
    Ok(ConsistencyResult::inconsistent(
        Procedure::MulticlassMicro,
        Finding::NoIntegerSolution,
        evidence,
    ))
}

/// Macro-averaged scores: consistent iff some matrix with the given row sums
/// reproduces every class-mean score. Only affine scores are supported.
pub fn check_multiclass_macro(
    m: &MulticlassTestset,
    report: &ScoreReport,
    unc: &Uncertainty,
) -> Result<ConsistencyResult> {
    check_multiclass_macro_with(m, report, unc, &CheckOptions::default())
}

pub fn check_multiclass_macro_with(
    m: &MulticlassTestset,
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    check_shape(m)?;
    let constraints = report.constraints(unc)?;
    aggregate::macro_single(m, &constraints, report, unc, opts)
}
