//! Brute-force oracles and a generator of genuinely achievable reports.
//!
//! Nothing here touches interval pruning, inversion, or the integer search:
//! every oracle enumerates outcomes exhaustively and evaluates scores
//! pointwise, so agreement with the engine is independent evidence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AggregationMode, Assignment, Counts, Experiment, ExperimentSpec, FoldingScheme,
    MulticlassTestset, RegressionContext, ReportedValue, ScoreConstraint, ScoreReport, Testset,
    Uncertainty,
};
use crate::num::{self, Rational};
use crate::scores::{ConfusionCounts, ScoreId, ScoreValue, Scorer};

/// Largest enumeration an oracle accepts.
pub const ORACLE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleOracle {
    pub consistent: bool,
    /// All `(tp, tn)` witnesses in ascending order.
    pub witnesses: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MosOracle {
    pub consistent: bool,
    /// First per-fold `(tp, tn)` assignment found.
    pub witness: Option<Vec<(u64, u64)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroOracle {
    pub consistent: bool,
    pub witness: Option<Vec<Vec<u64>>>,
}

fn accepts_all(constraints: &[ScoreConstraint], counts: ConfusionCounts) -> bool {
    constraints
        .iter()
        .all(|c| c.scorer.evaluate(counts).is_some_and(|v| v.within(&c.target)))
}

/// Evaluates every `(tp, tn)` in `[0, p] x [0, n]`.
pub fn brute_force_single(testset: Testset, report: &ScoreReport, unc: &Uncertainty) -> Result<SingleOracle> {
    let size = (testset.p as u128 + 1) * (testset.n as u128 + 1);
    if size > ORACLE_CAP {
        return Err(Error::InstanceTooLarge { size, cap: ORACLE_CAP });
    }
    let constraints = report.constraints(unc)?;
    let mut witnesses = Vec::new();
    for tp in 0..=testset.p {
        for tn in 0..=testset.n {
            let counts = ConfusionCounts::new(tp, tn, testset.p, testset.n).expect("in range");
            if accepts_all(&constraints, counts) {
                witnesses.push((tp, tn));
            }
        }
    }
    Ok(SingleOracle {
        consistent: !witnesses.is_empty(),
        witnesses,
    })
}

/// Per-score table of exact values, scaled to integers over a common
/// denominator so that sums are cheap.
struct ScaledTable {
    /// `values[fold][assignment]`, `None` where the score is undefined.
    values: Vec<Vec<Option<i128>>>,
    lo: i128,
    hi: i128,
}

fn exact(v: ScoreValue, id: ScoreId) -> Result<Rational> {
    match v {
        ScoreValue::Exact(q) => Ok(q),
        ScoreValue::Root { .. } => Err(Error::NonlinearScoreUnsupported(id.to_string())),
    }
}

fn scaled_table(c: &ScoreConstraint, tables: Vec<Vec<Option<Rational>>>, weight: &Rational) -> Result<ScaledTable> {
    let mut den = BigInt::one();
    for q in tables.iter().flatten().flatten() {
        den = num_integer::Integer::lcm(&den, (q * weight).denom());
    }
    let den_q = Rational::from_integer(den);
    let to = |q: Rational| q.to_integer().to_i128().ok_or(Error::Overflow);
    let values = tables
        .into_iter()
        .map(|fold| {
            fold.into_iter()
                .map(|v| v.map(|q| to(q * weight * &den_q)).transpose())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = c.target.bounds().expect("targets are finite intervals");
    Ok(ScaledTable {
        values,
        lo: to(Rational::from_integer(num::ceil(&(lo * &den_q))))?,
        hi: to(Rational::from_integer(num::floor(&(hi * &den_q))))?,
    })
}

/// Enumerates every per-fold assignment; each fold's score has weight `1/k`.
pub fn brute_force_mos(folds: &[Testset], report: &ScoreReport, unc: &Uncertainty) -> Result<MosOracle> {
    if folds.is_empty() {
        return Err(Error::InvalidFoldCount { k: 0, total: 0 });
    }
    let size = folds
        .iter()
        .map(|f| (f.p as u128 + 1) * (f.n as u128 + 1))
        .try_fold(1u128, |acc, s| acc.checked_mul(s).filter(|v| *v <= ORACLE_CAP));
    let Some(_) = size else {
        return Err(Error::InstanceTooLarge {
            size: u128::MAX,
            cap: ORACLE_CAP,
        });
    };
    let constraints = report.constraints(unc)?;
    let cells: Vec<Vec<(u64, u64)>> = folds
        .iter()
        .map(|f| (0..=f.p).flat_map(|tp| (0..=f.n).map(move |tn| (tp, tn))).collect())
        .collect();
    let weight = Rational::new(1.into(), (folds.len() as i64).into());
    let mut tables = Vec::new();
    for c in &constraints {
        let mut per_fold = Vec::new();
        for (f, cs) in folds.iter().zip(&cells) {
            let mut vals = Vec::with_capacity(cs.len());
            for &(tp, tn) in cs {
                let v = c.scorer.evaluate(ConfusionCounts::new(tp, tn, f.p, f.n).expect("in range"));
                vals.push(v.map(|v| exact(v, c.id())).transpose()?);
            }
            per_fold.push(vals);
        }
        tables.push(scaled_table(c, per_fold, &weight)?);
    }

    let k = folds.len();
    let mut idx = vec![0usize; k];
    loop {
        let ok = tables.iter().all(|t| {
            let mut sum = 0i128;
            for (j, &i) in idx.iter().enumerate() {
                match t.values[j][i] {
                    Some(v) => sum += v,
                    None => return false,
                }
            }
            t.lo <= sum && sum <= t.hi
        });
        if ok {
            return Ok(MosOracle {
                consistent: true,
                witness: Some(idx.iter().enumerate().map(|(j, &i)| cells[j][i]).collect()),
            });
        }
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(MosOracle {
                    consistent: false,
                    witness: None,
                });
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < cells[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// All compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// One-vs-rest counts of class `i`, computed from rows and columns directly.
fn ovr(matrix: &[Vec<u64>], i: usize) -> ConfusionCounts {
    let total: u64 = matrix.iter().flatten().sum();
    let p: u64 = matrix[i].iter().sum();
    let predicted_i: u64 = matrix.iter().map(|row| row[i]).sum();
    let tp = matrix[i][i];
    let fp = predicted_i - tp;
    ConfusionCounts {
        tp,
        tn: total - p - fp,
        p,
        n: total - p,
    }
}

fn macro_value(scorer: &Scorer, matrix: &[Vec<u64>]) -> Result<Option<Rational>> {
    let mut sum = Rational::zero();
    for i in 0..matrix.len() {
        match scorer.evaluate(ovr(matrix, i)) {
            Some(v) => sum += exact(v, scorer.id)?,
            None => return Ok(None),
        }
    }
    Ok(Some(sum / num::int(matrix.len() as i64)))
}

/// Enumerates every matrix with the given row sums.
pub fn brute_force_macro(testset: &MulticlassTestset, report: &ScoreReport, unc: &Uncertainty) -> Result<MacroOracle> {
    let c = testset.classes();
    let size = testset
        .class_counts
        .iter()
        .map(|&ci| binomial(ci as u128 + c as u128 - 1, c as u128 - 1))
        .fold(1u128, |a, b| a.saturating_mul(b));
    if size > ORACLE_CAP {
        return Err(Error::InstanceTooLarge { size, cap: ORACLE_CAP });
    }
    let constraints = report.constraints(unc)?;
    let rows: Vec<Vec<Vec<u64>>> = testset.class_counts.iter().map(|&ci| compositions(ci, c)).collect();
    let mut idx = vec![0usize; c];
    loop {
        let matrix: Vec<Vec<u64>> = idx.iter().enumerate().map(|(i, &r)| rows[i][r].clone()).collect();
        let mut ok = true;
        for con in &constraints {
            match macro_value(&con.scorer, &matrix)? {
                Some(v) if con.target.contains(&v) => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(MacroOracle {
                consistent: true,
                witness: Some(matrix),
            });
        }
        let mut i = c;
        loop {
            if i == 0 {
                return Ok(MacroOracle {
                    consistent: false,
                    witness: None,
                });
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < rows[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMode {
    /// Half away from zero.
    Round,
    /// Toward zero.
    Truncate,
}

/// Decimal text of `v` with exactly `decimals` digits after the point.
pub fn format_score(v: &ScoreValue, decimals: u32, mode: RoundingMode) -> String {
    let scale = num::pow10(decimals as i64);
    let (negative, magnitude) = match v {
        ScoreValue::Exact(q) => {
            let s = (q * &scale).abs();
            let m = match mode {
                RoundingMode::Truncate => num::floor(&s),
                RoundingMode::Round => num::floor(&(s + num::ratio(1, 2))),
            };
            (q.is_negative(), m)
        }
        ScoreValue::Root { negative, square } => {
            let s2 = square * &scale * &scale;
            let f = num::floor_sqrt(&s2);
            let m = match mode {
                RoundingMode::Truncate => f,
                RoundingMode::Round => {
                    let half = Rational::from_integer(f.clone()) + num::ratio(1, 2);
                    if s2 >= &half * &half {
                        f + 1
                    } else {
                        f
                    }
                }
            };
            (*negative, m)
        }
    };
    let digits = magnitude.to_string();
    let sign = if negative && !magnitude.is_zero() { "-" } else { "" };
    if decimals == 0 {
        return format!("{sign}{digits}");
    }
    let d = decimals as usize;
    let padded = format!("{digits:0>width$}", width = d + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - d);
    format!("{sign}{int_part}.{frac_part}")
}

/// The outcome a generated report was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HiddenOutcome {
    /// Per dataset, per fold: the fold counts and its confusion outcome.
    Classification { datasets: Vec<Vec<(Counts, Assignment)>> },
    Regression { targets: Vec<String>, predictions: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedReport {
    /// The experiment to check the report against; for regression the
    /// target variance and sample count are filled in.
    pub experiment: Experiment,
    pub outcome: HiddenOutcome,
    pub report: ScoreReport,
    /// Exact values before rounding.
    pub exact: BTreeMap<String, String>,
}

/// Beta used when `fbeta` is requested.
pub const GENERATOR_BETA: i64 = 2;

/// Samples a uniformly random outcome of `experiment`, computes the
/// requested scores exactly and rounds or truncates them to `decimals`
/// digits. Scores undefined on the outcome, or means over irrational values,
/// are left out of the report.
pub fn generate_true_report(
    experiment: &Experiment,
    scores: &[&str],
    seed: u64,
    decimals: u32,
    mode: RoundingMode,
) -> Result<GeneratedReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match experiment {
        Experiment::Classification(spec) => generate_classification(spec, scores, &mut rng, decimals, mode),
        Experiment::Regression(ctx) => generate_regression(ctx, scores, &mut rng, decimals, mode),
    }
}

fn random_composition(rng: &mut ChaCha8Rng, total: u64, parts: usize) -> Vec<u64> {
    // stars and bars: choose part-1 bar positions among total+parts-1 slots
    let slots = (total as usize) + parts - 1;
    let mut bars: Vec<usize> = sample(rng, slots, parts - 1).into_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0usize;
    for (i, &b) in bars.iter().enumerate() {
        out.push((b - prev - if i == 0 { 0 } else { 1 }) as u64);
        prev = b;
    }
    let last_start = if bars.is_empty() { 0 } else { prev + 1 };
    out.push((slots - last_start) as u64);
    out
}

fn random_outcome(rng: &mut ChaCha8Rng, counts: &Counts) -> Assignment {
    match counts {
        Counts::Binary(t) => Assignment::Binary {
            tp: rng.gen_range(0..=t.p),
            tn: rng.gen_range(0..=t.n),
        },
        Counts::Multiclass(m) => Assignment::Matrix {
            matrix: m
                .class_counts
                .iter()
                .map(|&c| random_composition(rng, c, m.classes()))
                .collect(),
        },
    }
}

fn even_split(classes: &[u64], k: u64) -> Vec<Vec<u64>> {
    (0..k)
        .map(|j| classes.iter().map(|&c| c / k + if j < c % k { 1 } else { 0 }).collect())
        .collect()
}

/// Random k-fold split: shuffle the samples and cut at k-1 distinct points.
fn random_split(rng: &mut ChaCha8Rng, classes: &[u64], k: u64) -> Vec<Vec<u64>> {
    let mut labels: Vec<usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat(i).take(c as usize))
        .collect();
    let total = labels.len();
    for i in (1..total).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }
    let mut cuts: Vec<usize> = sample(rng, total - 1, k as usize - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(total);
    let mut folds = Vec::new();
    let mut start = 0;
    for end in cuts {
        let mut fold = vec![0u64; classes.len()];
        for &l in &labels[start..end] {
            fold[l] += 1;
        }
        folds.push(fold);
        start = end;
    }
    folds
}

/// Binary confusion counts an outcome is scored on (micro view for matrices).
fn pooled_binary(parts: &[(Counts, Assignment)]) -> ConfusionCounts {
    let mut acc = ConfusionCounts {
        tp: 0,
        tn: 0,
        p: 0,
        n: 0,
    };
    for (counts, a) in parts {
        let c = match (counts, a) {
            (Counts::Binary(t), Assignment::Binary { tp, tn }) => ConfusionCounts {
                tp: *tp,
                tn: *tn,
                p: t.p,
                n: t.n,
            },
            (Counts::Multiclass(_), Assignment::Matrix { matrix }) => {
                // sum of one-vs-rest matrices over classes
                (0..matrix.len()).map(|i| ovr(matrix, i)).fold(
                    ConfusionCounts { tp: 0, tn: 0, p: 0, n: 0 },
                    |s, c| ConfusionCounts {
                        tp: s.tp + c.tp,
                        tn: s.tn + c.tn,
                        p: s.p + c.p,
                        n: s.n + c.n,
                    },
                )
            }
            _ => unreachable!("outcomes follow counts"),
        };
        acc.tp += c.tp;
        acc.tn += c.tn;
        acc.p += c.p;
        acc.n += c.n;
    }
    acc
}

fn pooled_matrix(parts: &[(Counts, Assignment)]) -> Vec<Vec<u64>> {
    let mut sum: Vec<Vec<u64>> = Vec::new();
    for (_, a) in parts {
        let Assignment::Matrix { matrix } = a else { unreachable!() };
        if sum.is_empty() {
            sum = matrix.clone();
        } else {
            for (r, row) in sum.iter_mut().zip(matrix) {
                for (x, y) in r.iter_mut().zip(row) {
                    *x += y;
                }
            }
        }
    }
    sum
}

/// Score of a pooled group of outcomes, `None` when undefined.
fn pooled_value(scorer: &Scorer, parts: &[(Counts, Assignment)], class_agg: Option<AggregationMode>) -> Option<ScoreValue> {
    match (&parts[0].0, class_agg) {
        (Counts::Multiclass(_), Some(AggregationMode::Mos)) => {
            macro_value(scorer, &pooled_matrix(parts)).ok().flatten().map(ScoreValue::Exact)
        }
        _ => scorer.evaluate(pooled_binary(parts)),
    }
}

/// Mean of values; `None` when any is undefined or irrational.
fn mean(values: Vec<Option<ScoreValue>>) -> Option<ScoreValue> {
    let k = values.len();
    if k == 1 {
        return values.into_iter().next().flatten();
    }
    let mut sum = Rational::zero();
    for v in values {
        sum += v?.as_rational()?;
    }
    Some(ScoreValue::Exact(sum / num::int(k as i64)))
}

fn generate_classification(
    spec: &ExperimentSpec,
    scores: &[&str],
    rng: &mut ChaCha8Rng,
    decimals: u32,
    mode: RoundingMode,
) -> Result<GeneratedReport> {
    crate::model::validate_experiment(spec)?;
    let ids: Vec<ScoreId> = scores.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let beta = num::int(GENERATOR_BETA);
    let mut datasets = Vec::new();
    for d in &spec.datasets {
        let classes = d.testset.class_vector();
        let multiclass = d.testset.is_multiclass();
        let folds: Vec<Vec<u64>> = match &d.folding {
            FoldingScheme::None => vec![classes.clone()],
            FoldingScheme::KnownFolds { folds } => folds.iter().map(Counts::class_vector).collect(),
            FoldingScheme::StratifiedKfold { k } => even_split(&classes, *k),
            FoldingScheme::UnknownFoldsKfold { k } => random_split(rng, &classes, *k),
        };
        let outcomes = folds
            .into_iter()
            .map(|f| {
                let counts = Counts::from_class_vector(multiclass, f);
                let a = random_outcome(rng, &counts);
                (counts, a)
            })
            .collect::<Vec<_>>();
        datasets.push(outcomes);
    }

    let mut report = ScoreReport::default();
    let mut exact_values = BTreeMap::new();
    for id in ids {
        let scorer = if id == ScoreId::FBeta {
            report.beta = Some(beta.clone());
            Scorer::with_beta(id, beta.clone())
        } else {
            Scorer::new(id)
        };
        let value = match spec.dataset_aggregation {
            Some(AggregationMode::Som) => {
                let all: Vec<(Counts, Assignment)> = datasets.iter().flatten().cloned().collect();
                pooled_value(&scorer, &all, spec.class_aggregation)
            }
            _ => {
                let per_dataset = datasets
                    .iter()
                    .map(|outcomes| match spec.fold_aggregation {
                        Some(AggregationMode::Mos) => mean(
                            outcomes
                                .iter()
                                .map(|o| pooled_value(&scorer, std::slice::from_ref(o), spec.class_aggregation))
                                .collect(),
                        ),
                        _ => pooled_value(&scorer, outcomes, spec.class_aggregation),
                    })
                    .collect();
                mean(per_dataset)
            }
        };
        if let Some(v) = value {
            insert(&mut report, &mut exact_values, id.as_str(), &v, decimals, mode);
        }
    }
    if report.entries.is_empty() {
        return Err(Error::EmptyReport);
    }
    Ok(GeneratedReport {
        experiment: Experiment::Classification(spec.clone()),
        outcome: HiddenOutcome::Classification { datasets },
        report,
        exact: exact_values,
    })
}

fn insert(
    report: &mut ScoreReport,
    exact_values: &mut BTreeMap<String, String>,
    id: &str,
    v: &ScoreValue,
    decimals: u32,
    mode: RoundingMode,
) {
    let text = format_score(v, decimals, mode);
    let value = num::parse_decimal(&text).expect("formatted decimal parses").value;
    report.entries.insert(
        id.to_string(),
        ReportedValue {
            value,
            text,
            from_json_number: false,
        },
    );
    exact_values.insert(id.to_string(), v.to_string());
}

fn generate_regression(
    _ctx: &RegressionContext,
    scores: &[&str],
    rng: &mut ChaCha8Rng,
    decimals: u32,
    mode: RoundingMode,
) -> Result<GeneratedReport> {
    for s in scores {
        if !crate::regression::REGRESSION_SCORES.contains(s) {
            return Err(Error::UnknownScoreId(s.to_string()));
        }
    }
    let len = rng.gen_range(2..=50usize);
    let quarter = |v: i64| num::ratio(v, 4);
    let (targets, predictions) = loop {
        let y: Vec<Rational> = (0..len).map(|_| quarter(rng.gen_range(-80..=80))).collect();
        if y.iter().any(|v| v != &y[0]) {
            let p: Vec<Rational> = y.iter().map(|v| v + quarter(rng.gen_range(-20..=20))).collect();
            break (y, p);
        }
    };
    let nq = num::int(len as i64);
    let mean_y = targets.iter().fold(Rational::zero(), |a, v| a + v) / &nq;
    let variance = targets.iter().fold(Rational::zero(), |a, v| a + (v - &mean_y) * (v - &mean_y)) / &nq;
    let errors: Vec<Rational> = targets.iter().zip(&predictions).map(|(y, p)| p - y).collect();
    let mae = errors.iter().fold(Rational::zero(), |a, e| a + e.abs()) / &nq;
    let mse = errors.iter().fold(Rational::zero(), |a, e| a + e * e) / &nq;
    let r2 = Rational::one() - &mse / &variance;

    let mut report = ScoreReport::default();
    let mut exact_values = BTreeMap::new();
    for s in scores {
        let v = match *s {
            "mae" => ScoreValue::Exact(mae.clone()),
            "mse" => ScoreValue::Exact(mse.clone()),
            "rmse" => ScoreValue::root(false, mse.clone()),
            _ => ScoreValue::Exact(r2.clone()),
        };
        insert(&mut report, &mut exact_values, s, &v, decimals, mode);
    }
    if report.entries.is_empty() {
        return Err(Error::EmptyReport);
    }
    Ok(GeneratedReport {
        experiment: Experiment::Regression(RegressionContext {
            n_samples: Some(len as u64),
            target_variance: Some(variance),
        }),
        outcome: HiddenOutcome::Regression {
            targets: targets.iter().map(num::to_text).collect(),
            predictions: predictions.iter().map(num::to_text).collect(),
        },
        report,
        exact: exact_values,
    })
}
