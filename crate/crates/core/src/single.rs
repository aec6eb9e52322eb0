//! Exact consistency test for one binary confusion matrix.
//!
//! Count boxes are narrowed by inverting every score constraint until a
//! fixpoint, then the surviving candidates are verified pointwise.

use crate::error::{Error, Result};
use crate::model::{
    Assignment, ConsistencyResult, Evidence, Finding, Procedure, ScoreConstraint, ScoreReport,
    Testset, Uncertainty, Witness,
};
use crate::rint::IntRange;
use crate::scores::ConfusionCounts;

const MAX_PRUNING_ROUNDS: usize = 100;

/// Default cap on candidate pairs left after pruning in [`feasible_region`].
pub const DEFAULT_REGION_CAP: u128 = 10_000_000;

/// Result of pruning: either surviving boxes or the reason none survive.
enum Pruned {
    Boxes(IntRange, IntRange),
    Empty(Finding),
}

/// Findings that do not depend on the counts: an impossible reported value or
/// a score that is undefined for every outcome.
pub(crate) fn static_finding(constraints: &[ScoreConstraint], p: u64, n: u64) -> Option<Finding> {
    for c in constraints {
        if c.target.intersect(&c.id().range_interval()).is_empty() {
            return Some(Finding::ValueOutOfRange {
                score: c.id().to_string(),
            });
        }
        if c.scorer.undefined_everywhere(p, n) {
            return Some(Finding::UndefinedScore {
                score: c.id().to_string(),
                location: format!("testset p={p}, n={n}"),
            });
        }
    }
    None
}

fn prune(constraints: &[ScoreConstraint], p: u64, n: u64) -> Pruned {
    if let Some(f) = static_finding(constraints, p, n) {
        return Pruned::Empty(f);
    }
    let mut tp_box = IntRange::new(0, p as i64).expect("p >= 0");
    let mut tn_box = IntRange::new(0, n as i64).expect("n >= 0");
    for _ in 0..MAX_PRUNING_ROUNDS {
        let before = (tp_box, tn_box);
        for c in constraints {
            match c.scorer.invert_tp(&c.target, tp_box, tn_box, p, n) {
                Some(b) => tp_box = b,
                None => return Pruned::Empty(pruned(c, "tp")),
            }
            match c.scorer.invert_tn(&c.target, tp_box, tn_box, p, n) {
                Some(b) => tn_box = b,
                None => return Pruned::Empty(pruned(c, "tn")),
            }
        }
        if before == (tp_box, tn_box) {
            break;
        }
    }
    Pruned::Boxes(tp_box, tn_box)
}

fn pruned(c: &ScoreConstraint, variable: &str) -> Finding {
    Finding::Pruned {
        score: c.id().to_string(),
        variable: variable.into(),
    }
}

fn satisfies(constraints: &[ScoreConstraint], counts: ConfusionCounts) -> bool {
    constraints
        .iter()
        .all(|c| c.scorer.evaluate(counts).is_some_and(|v| c.accepts(&v)))
}

/// The tn range still feasible for a fixed tp.
fn tn_range_for(constraints: &[ScoreConstraint], tp: i64, tn_box: IntRange, p: u64, n: u64) -> Option<IntRange> {
    let tp_point = IntRange::point(tp);
    let mut tn = tn_box;
    for c in constraints {
        tn = c.scorer.invert_tn(&c.target, tp_point, tn, p, n)?;
    }
    Some(tn)
}

/// Visits candidate pairs in ascending (tp, tn) order until `visit` returns
/// false.
fn scan(
    constraints: &[ScoreConstraint],
    tp_box: IntRange,
    tn_box: IntRange,
    p: u64,
    n: u64,
    mut visit: impl FnMut(u64, u64) -> bool,
) {
    for tp in tp_box.lo..=tp_box.hi {
        let Some(tns) = tn_range_for(constraints, tp, tn_box, p, n) else {
            continue;
        };
        for tn in tns.lo..=tns.hi {
            let counts = ConfusionCounts::new(tp as u64, tn as u64, p, n).expect("within box");
            if satisfies(constraints, counts) && !visit(tp as u64, tn as u64) {
                return;
            }
        }
    }
}

pub(crate) fn achieved_evidence(
    evidence: &mut Evidence,
    constraints: &[ScoreConstraint],
    counts: ConfusionCounts,
) {
    for (entry, c) in evidence.scores.iter_mut().zip(constraints) {
        entry.achieved = c.scorer.evaluate(counts).map(|v| v.to_string());
    }
}

/// Decides whether some `(tp, tn)` reproduces every reported score within
/// its radius. The first witness in ascending `(tp, tn)` order is returned.
pub fn check_single_testset(
    testset: Testset,
    report: &ScoreReport,
    unc: &Uncertainty,
) -> Result<ConsistencyResult> {
    if testset.total() == 0 {
        return Err(Error::EmptyExperiment("testset has no samples".into()));
    }
    let constraints = report.constraints(unc)?;
    let mut evidence = Evidence::for_report(report, unc);
    let (p, n) = (testset.p, testset.n);
    let (tp_box, tn_box) = match prune(&constraints, p, n) {
        Pruned::Boxes(a, b) => (a, b),
        Pruned::Empty(f) => {
            return Ok(ConsistencyResult::inconsistent(Procedure::SingleTestset, f, evidence))
        }
    };
    let mut found = None;
    scan(&constraints, tp_box, tn_box, p, n, |tp, tn| {
        found = Some((tp, tn));
        false
    });
    Ok(match found {
        Some((tp, tn)) => {
            let counts = ConfusionCounts::new(tp, tn, p, n).expect("witness in range");
            achieved_evidence(&mut evidence, &constraints, counts);
            ConsistencyResult::consistent(
                Procedure::SingleTestset,
                Witness::Single(Assignment::Binary { tp, tn }),
                evidence,
            )
        }
        None => ConsistencyResult::inconsistent(
            Procedure::SingleTestset,
            Finding::NoIntegerSolution,
            evidence,
        ),
    })
}

/// Every `(tp, tn)` witness, in ascending order.
pub fn feasible_region(testset: Testset, report: &ScoreReport, unc: &Uncertainty) -> Result<Vec<(u64, u64)>> {
    feasible_region_capped(testset, report, unc, DEFAULT_REGION_CAP)
}

pub fn feasible_region_capped(
    testset: Testset,
    report: &ScoreReport,
    unc: &Uncertainty,
    cap: u128,
) -> Result<Vec<(u64, u64)>> {
    let constraints = report.constraints(unc)?;
    let (p, n) = (testset.p, testset.n);
    let (tp_box, tn_box) = match prune(&constraints, p, n) {
        Pruned::Boxes(a, b) => (a, b),
        Pruned::Empty(_) => return Ok(Vec::new()),
    };
    let count = tp_box.len() as u128 * tn_box.len() as u128;
    if count > cap {
        return Err(Error::RegionTooLarge { count, cap });
    }
    let mut out = Vec::new();
    scan(&constraints, tp_box, tn_box, p, n, |tp, tn| {
        out.push((tp, tn));
        true
    });
    Ok(out)
}
