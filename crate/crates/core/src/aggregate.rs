//! Aggregated experiments: pooling, mean-of-scores integer feasibility, fold
//! configuration enumeration, and the experiment dispatcher.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::folds;
use crate::ilp::{BranchAndBound, FeasibilitySolver, IntegerProgram, LinearConstraint, DEFAULT_NODE_LIMIT};
use crate::model::{
    validate_experiment, AggregationMode, Assignment, ConsistencyResult, Counts, Evidence,
    Experiment, Finding, FoldingScheme, LeafWitness, MulticlassTestset, Procedure,
    ScoreConstraint, ScoreReport, Testset, Uncertainty, Witness,
};
use crate::multiclass::{self, macro_class_counts, micro_counts};
use crate::num::{self, Rational};
use crate::regression;
use crate::scores::{Affine, AffineForm, ConfusionCounts, ScoreValue};
use crate::single;

pub const DEFAULT_CONFIG_CAP: u64 = 1_000_000;

/// Resource limits for a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Maximum number of fold configurations enumerated for unknown folds.
    pub config_cap: u64,
    /// Maximum branch-and-bound nodes per integer program.
    pub node_limit: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            config_cap: DEFAULT_CONFIG_CAP,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Pooled testset of a fold list.
pub fn reduce_som(folds: &[Testset]) -> Testset {
    folds
        .iter()
        .fold(Testset::new(0, 0), |acc, f| Testset::new(acc.p + f.p, acc.n + f.n))
}

fn pool(parts: &[Counts]) -> Counts {
    let multiclass = parts[0].is_multiclass();
    let mut sums = vec![0u64; parts[0].class_vector().len()];
    for part in parts {
        for (s, c) in sums.iter_mut().zip(part.class_vector()) {
            *s += c;
        }
    }
    Counts::from_class_vector(multiclass, sums)
}

/// Stratified even split as binary testsets.
pub fn enumerate_stratified_fold_sizes(p: u64, n: u64, k: u64) -> Result<Vec<Testset>> {
    Ok(folds::stratified_split(&[p, n], k)?
        .into_iter()
        .map(|f| Testset::new(f[0], f[1]))
        .collect())
}

/// All multisets of `k` nonempty binary folds summing to `(p, n)`.
pub fn enumerate_fold_configurations(p: u64, n: u64, k: u64, cap: u64) -> Result<Vec<Vec<Testset>>> {
    Ok(folds::fold_configurations(&[p, n], k, cap)?
        .into_iter()
        .map(|cfg| cfg.into_iter().map(|f| Testset::new(f[0], f[1])).collect())
        .collect())
}

/// How a leaf's confusion outcome is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LeafKind {
    Binary,
    Micro,
    Macro,
}

/// One independently scored part of an experiment; its score enters the
/// reported mean with `weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Leaf {
    pub dataset: usize,
    pub fold: Option<usize>,
    pub counts: Counts,
    pub weight: Rational,
}

impl Leaf {
    fn location(&self) -> String {
        match self.fold {
            Some(f) => format!("dataset {} fold {}", self.dataset, f),
            None => format!("dataset {}", self.dataset),
        }
    }
}

fn leaf_kind(counts: &Counts, class_aggregation: Option<AggregationMode>) -> LeafKind {
    match (counts, class_aggregation) {
        (Counts::Binary(_), _) => LeafKind::Binary,
        (Counts::Multiclass(_), Some(AggregationMode::Som)) => LeafKind::Micro,
        (Counts::Multiclass(_), _) => LeafKind::Macro,
    }
}

/// Per dataset, the possible fold lists; `None` entries mean "unfolded".
fn fold_options(spec: &crate::model::ExperimentSpec, cap: u64) -> Result<Vec<Vec<Option<Vec<Counts>>>>> {
    let pooled_folds = spec.fold_aggregation == Some(AggregationMode::Som);
    spec.datasets
        .iter()
        .map(|d| {
            let multiclass = d.testset.is_multiclass();
            let parent = d.testset.class_vector();
            let wrap = |v: Vec<Vec<u64>>| -> Vec<Counts> {
                v.into_iter().map(|f| Counts::from_class_vector(multiclass, f)).collect()
            };
            Ok(match &d.folding {
                // pooling folds reproduces the parent testset whatever the split
                _ if pooled_folds => vec![None],
                FoldingScheme::None => vec![None],
                FoldingScheme::KnownFolds { folds } => vec![Some(folds.clone())],
                FoldingScheme::StratifiedKfold { k } => vec![Some(wrap(folds::stratified_split(&parent, *k)?))],
                FoldingScheme::UnknownFoldsKfold { k } => folds::fold_configurations(&parent, *k, cap)?
                    .into_iter()
                    .map(|c| Some(wrap(c)))
                    .collect(),
            })
        })
        .collect()
}

fn build_leaves(spec: &crate::model::ExperimentSpec, choice: &[&Option<Vec<Counts>>]) -> Vec<Leaf> {
    let per_dataset: Vec<Vec<Leaf>> = spec
        .datasets
        .iter()
        .zip(choice)
        .enumerate()
        .map(|(d, (ds, folds))| match folds {
            Some(folds) if folds.len() > 1 => {
                let w = Rational::new(1.into(), (folds.len() as i64).into());
                folds
                    .iter()
                    .enumerate()
                    .map(|(j, f)| Leaf {
                        dataset: d,
                        fold: Some(j),
                        counts: f.clone(),
                        weight: w.clone(),
                    })
                    .collect()
            }
            _ => vec![Leaf {
                dataset: d,
                fold: None,
                counts: ds.testset.clone(),
                weight: Rational::one(),
            }],
        })
        .collect();
    match spec.dataset_aggregation {
        Some(AggregationMode::Som) => {
            let parts: Vec<Counts> = spec.datasets.iter().map(|d| d.testset.clone()).collect();
            vec![Leaf {
                dataset: 0,
                fold: None,
                counts: pool(&parts),
                weight: Rational::one(),
            }]
        }
        Some(AggregationMode::Mos) => {
            let w = Rational::new(1.into(), (per_dataset.len() as i64).into());
            per_dataset
                .into_iter()
                .flatten()
                .map(|mut l| {
                    l.weight *= &w;
                    l
                })
                .collect()
        }
        None => per_dataset.into_iter().flatten().collect(),
    }
}

/// Variables of one leaf inside the integer program.
enum LeafVars {
    Binary { tp: usize, tn: usize },
    Micro { t: usize },
    Macro { m: Vec<Vec<usize>> },
}

fn affine_or_refuse(c: &ScoreConstraint, p: u64, n: u64) -> Result<Option<Affine>> {
    match c.scorer.affine(p, n) {
        AffineForm::Affine(a) => Ok(Some(a)),
        AffineForm::Undefined => Ok(None),
        AffineForm::Nonlinear => Err(Error::NonlinearScoreUnsupported(c.id().to_string())),
    }
}

pub(crate) enum LeafOutcome {
    Feasible(Vec<LeafWitness>),
    Infeasible(Finding),
}

/// Mean-of-scores feasibility over `leaves`; every score must be affine.
pub(crate) fn solve_leaves(
    leaves: &[Leaf],
    kind: impl Fn(&Counts) -> LeafKind,
    constraints: &[ScoreConstraint],
    opts: &CheckOptions,
) -> Result<LeafOutcome> {
    for c in constraints {
        if !c.id().is_linear() {
            return Err(Error::NonlinearScoreUnsupported(c.id().to_string()));
        }
    }
    let mut prog = IntegerProgram::default();
    let mut vars = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        let v = match (&leaf.counts, kind(&leaf.counts)) {
            (Counts::Binary(t), _) => LeafVars::Binary {
                tp: prog.add_variable(0, t.p as i64),
                tn: prog.add_variable(0, t.n as i64),
            },
            (Counts::Multiclass(m), LeafKind::Micro) => LeafVars::Micro {
                t: prog.add_variable(0, m.total() as i64),
            },
            (Counts::Multiclass(m), _) => {
                let vars: Vec<Vec<usize>> = m
                    .class_counts
                    .iter()
                    .map(|&c| (0..m.classes()).map(|_| prog.add_variable(0, c as i64)).collect())
                    .collect();
                for (row, &c) in vars.iter().zip(&m.class_counts) {
                    prog.constraints.push(LinearConstraint {
                        terms: row.iter().map(|&v| (v, Rational::one())).collect(),
                        constant: Rational::zero(),
                        bounds: crate::rint::RationalInterval::point(num::int(c as i64)),
                    });
                }
                LeafVars::Macro { m: vars }
            }
        };
        vars.push(v);
    }

    for c in constraints {
        let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut constant = Rational::zero();
        for (leaf, v) in leaves.iter().zip(&vars) {
            let undefined = || Finding::UndefinedScore {
                score: c.id().to_string(),
                location: leaf.location(),
            };
            match (v, &leaf.counts) {
                (LeafVars::Binary { tp, tn }, Counts::Binary(t)) => {
                    let Some(a) = affine_or_refuse(c, t.p, t.n)? else {
                        return Ok(LeafOutcome::Infeasible(undefined()));
                    };
                    *terms.entry(*tp).or_default() += &leaf.weight * &a.tp;
                    *terms.entry(*tn).or_default() += &leaf.weight * &a.tn;
                    constant += &leaf.weight * &a.constant;
                }
                (LeafVars::Micro { t }, Counts::Multiclass(m)) => {
                    let (nn, cc) = (m.total(), m.classes() as u64);
                    let Some(a) = affine_or_refuse(c, nn, nn * (cc - 1))? else {
                        return Ok(LeafOutcome::Infeasible(undefined()));
                    };
                    // tp = t, tn = N(C-2) + t
                    *terms.entry(*t).or_default() += &leaf.weight * (&a.tp + &a.tn);
                    let offset = num::int((nn * (cc - 2)) as i64);
                    constant += &leaf.weight * (&a.tn * offset + &a.constant);
                }
                (LeafVars::Macro { m: mv }, Counts::Multiclass(m)) => {
                    let nn = m.total();
                    let w = &leaf.weight / num::int(m.classes() as i64);
                    for (i, &ci) in m.class_counts.iter().enumerate() {
                        let Some(a) = affine_or_refuse(c, ci, nn - ci)? else {
                            return Ok(LeafOutcome::Infeasible(Finding::UndefinedScore {
                                score: c.id().to_string(),
                                location: format!("{} class {}", leaf.location(), i),
                            }));
                        };
                        // tp_i = m_ii, tn_i = (N - c_i) - sum_{j != i} m_ji
                        *terms.entry(mv[i][i]).or_default() += &w * &a.tp;
                        for (j, row) in mv.iter().enumerate() {
                            if j != i {
                                *terms.entry(row[i]).or_default() -= &w * &a.tn;
                            }
                        }
                        constant += &w * (&a.tn * num::int((nn - ci) as i64) + &a.constant);
                    }
                }
                _ => unreachable!("leaf variables follow leaf counts"),
            }
        }
        prog.constraints.push(LinearConstraint {
            terms: terms.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
            constant,
            bounds: c.target.clone(),
        });
    }

    let solver = BranchAndBound {
        node_limit: opts.node_limit,
    };
    let Some(x) = solver.solve(&prog)? else {
        return Ok(LeafOutcome::Infeasible(Finding::NoIntegerSolution));
    };
    let witness = leaves
        .iter()
        .zip(&vars)
        .map(|(leaf, v)| LeafWitness {
            dataset: leaf.dataset,
            fold: leaf.fold,
            counts: leaf.counts.clone(),
            weight: leaf.weight.clone(),
            assignment: match v {
                LeafVars::Binary { tp, tn } => Assignment::Binary {
                    tp: x[*tp] as u64,
                    tn: x[*tn] as u64,
                },
                LeafVars::Micro { t } => Assignment::Trace { trace: x[*t] as u64 },
                LeafVars::Macro { m } => Assignment::Matrix {
                    matrix: m.iter().map(|row| row.iter().map(|&v| x[v] as u64).collect()).collect(),
                },
            },
        })
        .collect();
    Ok(LeafOutcome::Feasible(witness))
}

/// Score of one leaf under its assignment, `None` if undefined.
pub(crate) fn leaf_score(c: &ScoreConstraint, leaf: &LeafWitness) -> Option<ScoreValue> {
    match (&leaf.counts, &leaf.assignment) {
        (Counts::Binary(t), Assignment::Binary { tp, tn }) => {
            c.scorer.evaluate(ConfusionCounts::new(*tp, *tn, t.p, t.n)?)
        }
        (Counts::Multiclass(m), Assignment::Trace { trace }) => c.scorer.evaluate(micro_counts(m, *trace)?),
        (Counts::Multiclass(m), Assignment::Matrix { matrix }) => {
            let mut sum = Rational::zero();
            for i in 0..m.classes() {
                let v = c.scorer.evaluate(macro_class_counts(matrix, i)?)?;
                sum += v.as_rational()?;
            }
            Some(ScoreValue::Exact(sum / num::int(m.classes() as i64)))
        }
        _ => None,
    }
}

/// Weighted mean of exact leaf scores.
pub(crate) fn mean_score(c: &ScoreConstraint, leaves: &[LeafWitness]) -> Option<Rational> {
    let mut sum = Rational::zero();
    for leaf in leaves {
        let v = leaf_score(c, leaf)?;
        sum += &leaf.weight * v.as_rational()?;
    }
    Some(sum)
}

fn mos_result(
    procedure: Procedure,
    outcome: LeafOutcome,
    constraints: &[ScoreConstraint],
    mut evidence: Evidence,
) -> ConsistencyResult {
    match outcome {
        LeafOutcome::Feasible(leaves) => {
            for (entry, c) in evidence.scores.iter_mut().zip(constraints) {
                let mean = mean_score(c, &leaves);
                debug_assert!(mean.as_ref().is_some_and(|m| c.target.contains(m)));
                entry.achieved = mean.map(|m| num::to_text(&m));
            }
            ConsistencyResult::consistent(procedure, Witness::Leaves(leaves), evidence)
        }
        LeafOutcome::Infeasible(f) => ConsistencyResult::inconsistent(procedure, f, evidence),
    }
}

fn range_finding(constraints: &[ScoreConstraint]) -> Option<Finding> {
    constraints
        .iter()
        .find(|c| c.target.intersect(&c.id().range_interval()).is_empty())
        .map(|c| Finding::ValueOutOfRange {
            score: c.id().to_string(),
        })
}

/// Mean of scores over known binary folds, each fold weighted `1/k`.
pub fn check_mos_known_folds(folds: &[Testset], report: &ScoreReport, unc: &Uncertainty) -> Result<ConsistencyResult> {
    check_mos_known_folds_with(folds, report, unc, &CheckOptions::default())
}

pub fn check_mos_known_folds_with(
    folds: &[Testset],
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    if folds.is_empty() {
        return Err(Error::InvalidFoldCount { k: 0, total: 0 });
    }
    if let Some(f) = folds.iter().position(|f| f.total() == 0) {
        return Err(Error::EmptyExperiment(format!("fold {f} has no samples")));
    }
    let constraints = report.constraints(unc)?;
    let evidence = Evidence::for_report(report, unc);
    let w = Rational::new(1.into(), (folds.len() as i64).into());
    let leaves: Vec<Leaf> = folds
        .iter()
        .enumerate()
        .map(|(j, f)| Leaf {
            dataset: 0,
            fold: Some(j),
            counts: Counts::Binary(*f),
            weight: w.clone(),
        })
        .collect();
    if let Some(f) = range_finding(&constraints) {
        for c in &constraints {
            if !c.id().is_linear() {
                return Err(Error::NonlinearScoreUnsupported(c.id().to_string()));
            }
        }
        return Ok(ConsistencyResult::inconsistent(Procedure::MosKnownFolds, f, evidence));
    }
    let outcome = solve_leaves(&leaves, |_| LeafKind::Binary, &constraints, opts)?;
    Ok(mos_result(Procedure::MosKnownFolds, outcome, &constraints, evidence))
}

/// Mean of scores over `k` folds of unknown composition: consistent iff some
/// fold configuration admits a witness.
pub fn check_mos_unknown_folds(
    testset: Testset,
    k: u64,
    report: &ScoreReport,
    unc: &Uncertainty,
) -> Result<ConsistencyResult> {
    check_mos_unknown_folds_with(testset, k, report, unc, &CheckOptions::default())
}

pub fn check_mos_unknown_folds_with(
    testset: Testset,
    k: u64,
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    let mut spec = crate::model::ExperimentSpec::single(testset);
    spec.datasets[0].folding = FoldingScheme::UnknownFoldsKfold { k };
    spec.fold_aggregation = Some(AggregationMode::Mos);
    check_experiment_with(&spec, report, unc, opts)
}

/// Decides any classification experiment.
pub fn check_experiment(
    spec: &crate::model::ExperimentSpec,
    report: &ScoreReport,
    unc: &Uncertainty,
) -> Result<ConsistencyResult> {
    check_experiment_with(spec, report, unc, &CheckOptions::default())
}

pub fn check_experiment_with(
    spec: &crate::model::ExperimentSpec,
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    validate_experiment(spec)?;
    let constraints = report.constraints(unc)?;
    let class_agg = spec.class_aggregation;
    let kind = |c: &Counts| leaf_kind(c, class_agg);

    let options = fold_options(spec, opts.config_cap)?;
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    if total > opts.config_cap as u128 {
        return Err(Error::TooManyConfigurations {
            count: total.min(u64::MAX as u128) as u64,
            cap: opts.config_cap,
        });
    }
    let enumerating = total > 1
        || spec.datasets.iter().any(|d| {
            matches!(d.folding, FoldingScheme::UnknownFoldsKfold { .. })
                && spec.fold_aggregation == Some(AggregationMode::Mos)
        });

    let mut index = vec![0usize; options.len()];
    let mut checked = 0u64;
    loop {
        let choice: Vec<&Option<Vec<Counts>>> = options.iter().zip(&index).map(|(o, &i)| &o[i]).collect();
        let leaves = build_leaves(spec, &choice);
        checked += 1;
        let mut result = check_leaves(&leaves, &kind, &constraints, report, unc, opts)?;
        if enumerating {
            result.procedure = Procedure::MosUnknownFolds;
        }
        if !result.inconsistency {
            if enumerating {
                result.evidence.configuration = Some(
                    choice
                        .iter()
                        .zip(&spec.datasets)
                        .map(|(c, d)| (*c).clone().unwrap_or_else(|| vec![d.testset.clone()]))
                        .collect(),
                );
                result.evidence.configurations_checked = Some(checked);
            }
            return Ok(result);
        }
        // counts-independent findings hold for every configuration
        if matches!(result.evidence.finding, Some(Finding::ValueOutOfRange { .. })) {
            return Ok(result);
        }
        // advance the mixed-radix index, last dataset fastest
        let mut d = options.len();
        loop {
            if d == 0 {
                if enumerating {
                    result.evidence.finding = Some(Finding::NoFeasibleConfiguration { checked });
                    result.evidence.configurations_checked = Some(checked);
                }
                return Ok(result);
            }
            d -= 1;
            index[d] += 1;
            if index[d] < options[d].len() {
                break;
            }
            index[d] = 0;
        }
    }
}

fn check_leaves(
    leaves: &[Leaf],
    kind: &impl Fn(&Counts) -> LeafKind,
    constraints: &[ScoreConstraint],
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    if let [leaf] = leaves {
        if leaf.weight.is_one() {
            return match (&leaf.counts, kind(&leaf.counts)) {
                (Counts::Binary(t), _) => single::check_single_testset(*t, report, unc),
                (Counts::Multiclass(m), LeafKind::Micro) => multiclass::check_multiclass_micro(m, report, unc),
                (Counts::Multiclass(m), _) => multiclass::check_multiclass_macro_with(m, report, unc, opts),
            };
        }
    }
    let evidence = Evidence::for_report(report, unc);
    for c in constraints {
        if !c.id().is_linear() {
            return Err(Error::NonlinearScoreUnsupported(c.id().to_string()));
        }
    }
    if let Some(f) = range_finding(constraints) {
        return Ok(ConsistencyResult::inconsistent(Procedure::MosKnownFolds, f, evidence));
    }
    let outcome = solve_leaves(leaves, kind, constraints, opts)?;
    Ok(mos_result(Procedure::MosKnownFolds, outcome, constraints, evidence))
}

/// Decides a classification or regression experiment.
pub fn check(experiment: &Experiment, report: &ScoreReport, unc: &Uncertainty) -> Result<ConsistencyResult> {
    check_with(experiment, report, unc, &CheckOptions::default())
}

pub fn check_with(
    experiment: &Experiment,
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    match experiment {
        Experiment::Classification(spec) => check_experiment_with(spec, report, unc, opts),
        Experiment::Regression(ctx) => regression::check_regression(ctx, report, unc),
    }
}

/// Macro-average feasibility over the full matrix of one multiclass testset.
pub(crate) fn macro_single(
    m: &MulticlassTestset,
    constraints: &[ScoreConstraint],
    report: &ScoreReport,
    unc: &Uncertainty,
    opts: &CheckOptions,
) -> Result<ConsistencyResult> {
    let evidence = Evidence::for_report(report, unc);
    if let Some(f) = range_finding(constraints) {
        for c in constraints {
            if !c.id().is_linear() {
                return Err(Error::NonlinearScoreUnsupported(c.id().to_string()));
            }
        }
        return Ok(ConsistencyResult::inconsistent(Procedure::MulticlassMacro, f, evidence));
    }
    let leaf = Leaf {
        dataset: 0,
        fold: None,
        counts: Counts::Multiclass(m.clone()),
        weight: Rational::one(),
    };
    let outcome = solve_leaves(&[leaf], |_| LeafKind::Macro, constraints, opts)?;
    let mut result = mos_result(Procedure::MulticlassMacro, outcome, constraints, evidence);
    if let Some(Witness::Leaves(mut leaves)) = result.witness.take() {
        result.witness = Some(Witness::Single(leaves.remove(0).assignment));
    }
    Ok(result)
}
