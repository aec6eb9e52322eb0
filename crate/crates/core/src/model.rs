//! Experiment descriptions, score reports, uncertainty, and verdicts.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folds;
use crate::num::{self, serde_rational, serde_rational_map, serde_rational_opt, Rational};
use crate::rint::RationalInterval;
use crate::scores::{ScoreId, ScoreValue, Scorer};

/// Class cardinalities of a binary evaluation set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Testset {
    pub p: u64,
    pub n: u64,
}

impl Testset {
    pub fn new(p: u64, n: u64) -> Self {
        Self { p, n }
    }

    pub fn total(&self) -> u64 {
        self.p + self.n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticlassTestset {
    pub class_counts: Vec<u64>,
}

impl MulticlassTestset {
    pub fn new(class_counts: Vec<u64>) -> Self {
        Self { class_counts }
    }

    pub fn total(&self) -> u64 {
        self.class_counts.iter().sum()
    }

    pub fn classes(&self) -> usize {
        self.class_counts.len()
    }
}

/// Either kind of testset; JSON shape decides (`{p, n}` or `{class_counts}`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    Binary(Testset),
    Multiclass(MulticlassTestset),
}

impl Counts {
    /// Per-class counts; binary testsets are `[p, n]`.
    pub fn class_vector(&self) -> Vec<u64> {
        match self {
            Counts::Binary(t) => vec![t.p, t.n],
            Counts::Multiclass(m) => m.class_counts.clone(),
        }
    }

    pub fn from_class_vector(multiclass: bool, v: Vec<u64>) -> Counts {
        if multiclass {
            Counts::Multiclass(MulticlassTestset::new(v))
        } else {
            Counts::Binary(Testset::new(v[0], v[1]))
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            Counts::Binary(t) => t.total(),
            Counts::Multiclass(m) => m.total(),
        }
    }

    pub fn is_multiclass(&self) -> bool {
        matches!(self, Counts::Multiclass(_))
    }
}

impl From<Testset> for Counts {
    fn from(t: Testset) -> Self {
        Counts::Binary(t)
    }
}

impl From<MulticlassTestset> for Counts {
    fn from(m: MulticlassTestset) -> Self {
        Counts::Multiclass(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FoldingScheme {
    #[default]
    None,
    KnownFolds {
        folds: Vec<Counts>,
    },
    StratifiedKfold {
        k: u64,
    },
    UnknownFoldsKfold {
        k: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    /// Score of means: pool counts, compute once (micro-average for classes).
    #[serde(alias = "score_of_means", alias = "micro")]
    Som,
    /// Mean of scores: compute per part, average (macro-average for classes).
    #[serde(alias = "mean_of_scores", alias = "macro")]
    Mos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub testset: Counts,
    #[serde(default)]
    pub folding: FoldingScheme,
}

impl Dataset {
    pub fn new(testset: impl Into<Counts>, folding: FoldingScheme) -> Self {
        Self {
            testset: testset.into(),
            folding,
        }
    }
}

/// A classification experiment: datasets, their folding, and how scores are
/// aggregated over folds, datasets, and (for multiclass) classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub datasets: Vec<Dataset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_aggregation: Option<AggregationMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_aggregation: Option<AggregationMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_aggregation: Option<AggregationMode>,
}

impl ExperimentSpec {
    pub fn single(testset: impl Into<Counts>) -> Self {
        Self {
            datasets: vec![Dataset::new(testset, FoldingScheme::None)],
            fold_aggregation: None,
            dataset_aggregation: None,
            class_aggregation: None,
        }
    }

    pub fn is_multiclass(&self) -> bool {
        self.datasets.iter().any(|d| d.testset.is_multiclass())
    }

    pub fn validate(&self) -> Result<()> {
        validate_experiment(self).map(|_| ())
    }
}

/// Context for regression reports. Variance uses the population convention
/// (divisor N).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionContext {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<u64>,
    #[serde(
        default,
        with = "serde_rational_opt",
        skip_serializing_if = "Option::is_none"
    )]
    pub target_variance: Option<Rational>,
}

/// Top-level experiment document, tagged by `task`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Experiment {
    Classification(ExperimentSpec),
    Regression(RegressionContext),
}

impl Experiment {
    /// Parses an experiment document; a missing `task` means classification.
    /// A document without `datasets` but with `p`/`n` (or `class_counts`)
    /// and an optional `folding` describes a single dataset.
    pub fn from_json(value: serde_json::Value) -> Result<Experiment> {
        let mut value = value;
        if let serde_json::Value::Object(map) = &mut value {
            let task = map
                .entry("task")
                .or_insert_with(|| serde_json::Value::String("classification".into()))
                .clone();
            if task == "classification" && !map.contains_key("datasets") {
                let mut testset = serde_json::Map::new();
                for key in ["p", "n", "class_counts"] {
                    if let Some(v) = map.remove(key) {
                        testset.insert(key.into(), v);
                    }
                }
                if !testset.is_empty() {
                    let mut dataset = serde_json::Map::new();
                    dataset.insert("testset".into(), testset.into());
                    if let Some(f) = map.remove("folding") {
                        dataset.insert("folding".into(), f);
                    }
                    map.insert("datasets".into(), serde_json::Value::Array(vec![dataset.into()]));
                }
            }
        }
        serde_json::from_value(value).map_err(|e| Error::Parse(format!("experiment: {e}")))
    }
}

fn validate_counts(c: &Counts, what: &str) -> Result<()> {
    if let Counts::Multiclass(m) = c {
        if m.classes() < 2 {
            return Err(Error::InvalidTestset(format!("{what} has fewer than two classes")));
        }
    }
    if c.total() == 0 {
        return Err(Error::EmptyExperiment(format!("{what} has no samples")));
    }
    Ok(())
}

/// Returns the spec unchanged when every invariant holds.
pub fn validate_experiment(spec: &ExperimentSpec) -> Result<&ExperimentSpec> {
    if spec.datasets.is_empty() {
        return Err(Error::EmptyExperiment("no datasets".into()));
    }
    let first = &spec.datasets[0].testset;
    for (i, d) in spec.datasets.iter().enumerate() {
        validate_counts(&d.testset, &format!("dataset {i}"))?;
        let same_kind = match (first, &d.testset) {
            (Counts::Binary(_), Counts::Binary(_)) => true,
            (Counts::Multiclass(a), Counts::Multiclass(b)) => a.classes() == b.classes(),
            _ => false,
        };
        if !same_kind {
            return Err(Error::MixedDatasets(format!(
                "dataset {i} differs in kind or class count from dataset 0"
            )));
        }
        let parent = d.testset.class_vector();
        match &d.folding {
            FoldingScheme::None => {}
            FoldingScheme::KnownFolds { folds } => {
                if folds.is_empty() {
                    return Err(Error::InvalidFoldCount {
                        k: 0,
                        total: d.testset.total(),
                    });
                }
                let mut sums = vec![0u64; parent.len()];
                for (j, f) in folds.iter().enumerate() {
                    validate_counts(f, &format!("fold {j} of dataset {i}"))?;
                    let v = f.class_vector();
                    if f.is_multiclass() != d.testset.is_multiclass() || v.len() != parent.len() {
                        return Err(Error::MixedDatasets(format!(
                            "fold {j} of dataset {i} differs in kind from its dataset"
                        )));
                    }
                    for (s, c) in sums.iter_mut().zip(&v) {
                        *s += c;
                    }
                }
                if sums != parent {
                    return Err(Error::FoldTotalsMismatch {
                        dataset: i,
                        detail: mismatch_detail(&sums, &parent, d.testset.is_multiclass()),
                    });
                }
            }
            FoldingScheme::StratifiedKfold { k } => {
                folds::stratified_split(&parent, *k)?;
            }
            FoldingScheme::UnknownFoldsKfold { k } => {
                let total = d.testset.total();
                if *k == 0 || *k > total {
                    return Err(Error::InvalidFoldCount { k: *k, total });
                }
            }
        }
    }

    let any_folding = spec
        .datasets
        .iter()
        .any(|d| d.folding != FoldingScheme::None);
    match (any_folding, spec.fold_aggregation) {
        (true, None) => {
            return Err(Error::MissingAggregationMode(
                "fold_aggregation is required when any dataset uses folds".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(Error::UnexpectedAggregationMode(
                "fold_aggregation must be absent when no dataset uses folds".into(),
            ))
        }
        _ => {}
    }
    match (spec.datasets.len() > 1, spec.dataset_aggregation) {
        (true, None) => {
            return Err(Error::MissingAggregationMode(
                "dataset_aggregation is required with more than one dataset".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(Error::UnexpectedAggregationMode(
                "dataset_aggregation must be absent with a single dataset".into(),
            ))
        }
        _ => {}
    }
    match (first.is_multiclass(), spec.class_aggregation) {
        (true, None) => {
            return Err(Error::MissingAggregationMode(
                "class_aggregation (micro/macro) is required for multiclass datasets".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(Error::UnexpectedAggregationMode(
                "class_aggregation applies to multiclass datasets only".into(),
            ))
        }
        _ => {}
    }
    if spec.dataset_aggregation == Some(AggregationMode::Som)
        && spec.fold_aggregation == Some(AggregationMode::Mos)
    {
        return Err(Error::IncompatibleAggregation(
            "dataset-level score of means cannot pool fold-level means of scores".into(),
        ));
    }
    Ok(spec)
}

fn mismatch_detail(sums: &[u64], parent: &[u64], multiclass: bool) -> String {
    let names: Vec<String> = if multiclass {
        (0..parent.len()).map(|i| format!("class {i}")).collect()
    } else {
        vec!["positives".into(), "negatives".into()]
    };
    sums.iter()
        .zip(parent)
        .zip(names)
        .filter(|((s, p), _)| s != p)
        .map(|((s, p), name)| format!("{name} {s} != {p}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Radius `10^-d` where `d` is the number of digits after the decimal point.
pub fn infer_radius_from_text(value_text: &str) -> Result<Rational> {
    let d = num::parse_decimal(value_text)?;
    Ok(num::pow10(d.last_digit_exponent))
}

/// Numerical uncertainty of reported scores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uncertainty {
    #[serde(with = "serde_rational")]
    pub default_radius: Rational,
    #[serde(default, with = "serde_rational_map", skip_serializing_if = "BTreeMap::is_empty")]
    pub per_score_radius: BTreeMap<String, Rational>,
    #[serde(default = "Rational::zero", with = "serde_rational")]
    pub solver_slack: Rational,
}

impl Uncertainty {
    pub fn new(default_radius: Rational) -> Self {
        Self {
            default_radius,
            per_score_radius: BTreeMap::new(),
            solver_slack: Rational::zero(),
        }
    }

    /// `10^-k`
    pub fn decimals(k: u32) -> Self {
        Self::new(num::pow10(-(k as i64)))
    }

    /// Per-score radii inferred from the reported decimal text.
    pub fn inferred(report: &ScoreReport) -> Result<Self> {
        let mut per_score = BTreeMap::new();
        for (id, v) in &report.entries {
            if v.from_json_number {
                return Err(Error::Parse(format!(
                    "cannot infer the radius of '{id}' from a JSON number; quote the value"
                )));
            }
            per_score.insert(id.clone(), infer_radius_from_text(&v.text)?);
        }
        let default_radius = per_score.values().max().cloned().unwrap_or_else(Rational::zero);
        Ok(Self {
            default_radius,
            per_score_radius: per_score,
            solver_slack: Rational::zero(),
        })
    }

    pub fn with_slack(mut self, slack: Rational) -> Self {
        self.solver_slack = slack;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.default_radius.is_negative() {
            return Err(Error::NegativeRadius("default".into()));
        }
        if self.solver_slack.is_negative() {
            return Err(Error::NegativeRadius("solver_slack".into()));
        }
        for (id, r) in &self.per_score_radius {
            if r.is_negative() {
                return Err(Error::NegativeRadius(id.clone()));
            }
        }
        Ok(())
    }

    pub fn radius(&self, score: &str) -> &Rational {
        self.per_score_radius.get(score).unwrap_or(&self.default_radius)
    }

    /// `[v - r - slack, v + r + slack]`
    pub fn target(&self, score: &str, value: &Rational) -> RationalInterval {
        let r = self.radius(score) + &self.solver_slack;
        RationalInterval::around(value, &r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportedValue {
    pub value: Rational,
    /// The text the value was parsed from.
    pub text: String,
    pub from_json_number: bool,
}

impl ReportedValue {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self {
            value: num::parse_decimal(text)?.value,
            text: text.trim().to_string(),
            from_json_number: false,
        })
    }
}

/// Reported scores keyed by score id. JSON form is a map of id to decimal
/// string (or number); the optional key `beta` parameterizes `fbeta`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreReport {
    pub entries: BTreeMap<String, ReportedValue>,
    pub beta: Option<Rational>,
}

impl ScoreReport {
    /// Builds a report from `(id, decimal text)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (id, text) in pairs {
            entries.insert(id.to_string(), ReportedValue::parse(text)?);
        }
        let report = Self { entries, beta: None };
        report.validate()?;
        Ok(report)
    }

    pub fn with_beta(mut self, beta: Rational) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::EmptyReport);
        }
        Ok(())
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Parse("scores must be a JSON object".into()))?;
        let mut report = ScoreReport::default();
        for (k, v) in map {
            let (text, from_json_number) = match v {
                serde_json::Value::String(s) => (s.clone(), false),
                serde_json::Value::Number(n) => (n.to_string(), true),
                other => return Err(Error::Parse(format!("score '{k}' has non-numeric value {other}"))),
            };
            if k == "beta" {
                report.beta = Some(num::parse_rational(&text)?);
                continue;
            }
            let mut rv = ReportedValue::parse(&text)?;
            rv.from_json_number = from_json_number;
            report.entries.insert(k.clone(), rv);
        }
        report.validate()?;
        Ok(report)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), serde_json::Value::String(v.text.clone()));
        }
        if let Some(b) = &self.beta {
            map.insert("beta".into(), serde_json::Value::String(num::to_text(b)));
        }
        serde_json::Value::Object(map)
    }
}

/// One reported classification score with its acceptance interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreConstraint {
    pub scorer: Scorer,
    pub target: RationalInterval,
}

impl ScoreConstraint {
    pub fn id(&self) -> ScoreId {
        self.scorer.id
    }

    pub fn accepts(&self, v: &ScoreValue) -> bool {
        v.within(&self.target)
    }
}

impl ScoreReport {
    /// Classification constraints in report order. `fbeta` needs `beta`.
    pub fn constraints(&self, unc: &Uncertainty) -> Result<Vec<ScoreConstraint>> {
        unc.validate()?;
        self.validate()?;
        self.entries
            .iter()
            .map(|(key, v)| {
                let id: ScoreId = key.parse()?;
                let scorer = match (id, &self.beta) {
                    (ScoreId::FBeta, Some(b)) => Scorer::with_beta(id, b.clone()),
                    (ScoreId::FBeta, None) => {
                        return Err(Error::Parse("fbeta reported without a 'beta' value".into()))
                    }
                    _ => Scorer::new(id),
                };
                Ok(ScoreConstraint {
                    scorer,
                    target: unc.target(key, &v.value),
                })
            })
            .collect()
    }
}

impl Serialize for ScoreReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScoreReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        ScoreReport::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    SingleTestset,
    MosKnownFolds,
    MosUnknownFolds,
    MulticlassMicro,
    MulticlassMacro,
    Regression,
}

impl Procedure {
    pub const ALL: [Procedure; 6] = [
        Procedure::SingleTestset,
        Procedure::MosKnownFolds,
        Procedure::MosUnknownFolds,
        Procedure::MulticlassMicro,
        Procedure::MulticlassMacro,
        Procedure::Regression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Procedure::SingleTestset => "single_testset",
            Procedure::MosKnownFolds => "mos_known_folds",
            Procedure::MosUnknownFolds => "mos_unknown_folds",
            Procedure::MulticlassMicro => "multiclass_micro",
            Procedure::MulticlassMacro => "multiclass_macro",
            Procedure::Regression => "regression",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Procedure::SingleTestset => {
                "one binary confusion matrix (single testset or pooled score-of-means), interval-pruned exhaustive enumeration"
            }
            Procedure::MosKnownFolds => {
                "mean of scores over known folds and/or datasets, exact integer branch-and-bound"
            }
            Procedure::MosUnknownFolds => {
                "mean of scores over k folds of unknown composition, enumerating fold configurations"
            }
            Procedure::MulticlassMicro => "multiclass micro-average via the confusion-matrix trace",
            Procedure::MulticlassMacro => {
                "multiclass macro-average, integer feasibility over the full confusion matrix"
            }
            Procedure::Regression => "necessary relations among mae, mse, rmse and r2",
        }
    }
}

/// Counts assigned to one confusion matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assignment {
    Binary { tp: u64, tn: u64 },
    /// Multiclass micro-average: trace of the confusion matrix.
    Trace { trace: u64 },
    /// Multiclass matrix, `matrix[i][j]` = class-i samples predicted as j.
    Matrix { matrix: Vec<Vec<u64>> },
}

/// One aggregated part (fold or dataset) of a mean-of-scores witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafWitness {
    pub dataset: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    pub counts: Counts,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Single(Assignment),
    Leaves(Vec<LeafWitness>),
}

/// Why a report was found inconsistent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Finding {
    /// The reported value cannot be reached by the score at all.
    ValueOutOfRange { score: String },
    /// Interval pruning emptied the domain of a count variable.
    Pruned { score: String, variable: String },
    /// Candidates remained after pruning but none reproduces every score.
    NoIntegerSolution,
    /// The score is undefined on a part of the experiment.
    UndefinedScore { score: String, location: String },
    /// No fold configuration admits a solution.
    NoFeasibleConfiguration { checked: u64 },
    /// A necessary relation among regression scores fails.
    RelationViolated { relation: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreEvidence {
    pub score: String,
    #[serde(with = "serde_rational")]
    pub reported: Rational,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
    /// Interval the true value must lie in.
    pub target: RationalInterval,
    /// Exact value on the witness, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieved: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Evidence {
    pub scores: Vec<ScoreEvidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finding: Option<Finding>,
    /// Fold shapes of the configuration that admitted the witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Vec<Vec<Counts>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configurations_checked: Option<u64>,
    /// Derived intervals (regression).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub intervals: BTreeMap<String, RationalInterval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Evidence {
    pub fn for_report(report: &ScoreReport, unc: &Uncertainty) -> Self {
        Evidence {
            scores: report
                .entries
                .iter()
                .map(|(id, v)| ScoreEvidence {
                    score: id.clone(),
                    reported: v.value.clone(),
                    radius: unc.radius(id).clone(),
                    target: unc.target(id, &v.value),
                    achieved: None,
                })
                .collect(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub inconsistency: bool,
    pub procedure: Procedure,
    pub witness: Option<Witness>,
    pub evidence: Evidence,
}

impl ConsistencyResult {
    pub fn consistent(procedure: Procedure, witness: Witness, evidence: Evidence) -> Self {
        Self {
            inconsistency: false,
            procedure,
            witness: Some(witness),
            evidence,
        }
    }

    pub fn inconsistent(procedure: Procedure, finding: Finding, mut evidence: Evidence) -> Self {
        evidence.finding = Some(finding);
        Self {
            inconsistency: true,
            procedure,
            witness: None,
            evidence,
        }
    }
}
