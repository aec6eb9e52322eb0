use num_traits::{One, Zero};
use proptest::prelude::*;
use serde_json::json;

use scoresleuth::aggregate::{check, check_with, reduce_som, CheckOptions};
use scoresleuth::bundles::{available_bundles, check_bundle, load_bundle};
use scoresleuth::model::{
    infer_radius_from_text, Assignment, Counts, Dataset, Experiment, ExperimentSpec, FoldingScheme,
    MulticlassTestset, AggregationMode, RegressionContext, ScoreReport, Testset, Uncertainty, Witness,
};
use scoresleuth::multiclass::check_multiclass_macro;
use scoresleuth::num::{self, Rational};
use scoresleuth::regression::check_regression;
use scoresleuth::scores::{default_scores, ConfusionCounts, ScoreId, Scorer};
use scoresleuth::single::check_single_testset;

fn decimal(steps: i64, decimals: u32) -> String {
    let scale = 10i64.pow(decimals);
    let sign = if steps < 0 { "-" } else { "" };
    let a = steps.abs();
    format!("{sign}{}.{:0width$}", a / scale, a % scale, width = decimals as usize)
}

fn linear_id() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["acc", "sens", "spec", "bacc", "err", "fpr", "fnr", "bm"])
}

fn any_id() -> impl Strategy<Value = &'static str> {
    prop::sample::select(default_scores().map(|d| d.id.as_str()).filter(|s| *s != "fbeta").collect::<Vec<_>>())
}

fn report_of(entries: Vec<(&'static str, i64)>, decimals: u32) -> ScoreReport {
    let texts: Vec<(&str, String)> = entries.iter().map(|(k, v)| (*k, decimal(*v, decimals))).collect();
    ScoreReport::from_pairs(texts.iter().map(|(k, v)| (*k, v.as_str()))).unwrap()
}

fn small_report(id: impl Strategy<Value = &'static str>) -> impl Strategy<Value = ScoreReport> {
    prop::collection::vec((id, 0i64..=100), 1..=3).prop_map(|e| report_of(e, 2))
}

fn testset(max: u64) -> impl Strategy<Value = Testset> {
    (0..=max, 0..=max).prop_filter("nonempty", |(p, n)| p + n > 0).prop_map(|(p, n)| Testset::new(p, n))
}

fn mode() -> impl Strategy<Value = AggregationMode> {
    prop_oneof![Just(AggregationMode::Som), Just(AggregationMode::Mos)]
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1u64..=20, 1u64..=20, 0usize..4, 1u64..=3).prop_flat_map(|(p, n, kind, k)| {
        let ts = Testset::new(p, n);
        let k = k.min(p.max(n));
        let scheme: BoxedStrategy<FoldingScheme> = match kind {
            0 => Just(FoldingScheme::None).boxed(),
            1 => Just(FoldingScheme::StratifiedKfold { k }).boxed(),
            2 => Just(FoldingScheme::UnknownFoldsKfold { k }).boxed(),
            _ => Just(FoldingScheme::KnownFolds {
                folds: vec![Counts::Binary(Testset::new(p - p / 2, n / 2)), Counts::Binary(Testset::new(p / 2, n - n / 2))],
            })
            .boxed(),
        };
        scheme.prop_map(move |s| Dataset::new(ts, s))
    })
}

fn spec() -> impl Strategy<Value = ExperimentSpec> {
    (prop::collection::vec(dataset(), 1..=3), mode(), mode()).prop_map(|(datasets, f, d)| {
        let folded = datasets.iter().any(|d| d.folding != FoldingScheme::None);
        let fold_aggregation = folded.then_some(f);
        let dataset_aggregation = match (datasets.len() > 1, fold_aggregation, d) {
            (false, _, _) => None,
            (true, Some(AggregationMode::Mos), _) => Some(AggregationMode::Mos),
            (true, _, d) => Some(d),
        };
        ExperimentSpec {
            datasets,
            fold_aggregation,
            dataset_aggregation,
            class_aggregation: None,
        }
    })
}

fn counts(tp: u64, tn: u64, p: u64, n: u64) -> ConfusionCounts {
    ConfusionCounts::new(tp, tn, p, n).unwrap()
}

fn value(id: ScoreId, c: ConfusionCounts) -> Option<Rational> {
    Scorer::new(id).evaluate(c).and_then(|v| v.as_rational().cloned())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spec_round_trip(s in spec()) {
        s.validate().unwrap();
        let e = Experiment::Classification(s);
        let text = serde_json::to_string(&e).unwrap();
        let back = Experiment::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn inferred_radius_matches_digits(int in 0u64..1000, frac in 0u64..1_000_000, digits in 1usize..=6) {
        let text = format!("{int}.{:0digits$}", frac % 10u64.pow(digits as u32));
        let r = infer_radius_from_text(&text).unwrap();
        prop_assert_eq!(r * num::pow10(digits as i64), Rational::one());
    }

    #[test]
    fn scores_in_range_and_complements(p in 0u64..=30, n in 0u64..=30, a in 0u64..=30, b in 0u64..=30) {
        prop_assume!(p + n > 0);
        let c = counts(a.min(p), b.min(n), p, n);
        for d in default_scores() {
            if let Some(v) = Scorer::with_beta(d.id, num::int(2)).evaluate(c) {
                let (lo, hi) = v.rational_bounds();
                prop_assert!(!d.id.range_interval().intersect(&scoresleuth::rint::RationalInterval::new(lo, hi)).is_empty());
            }
        }
        let one = Rational::one();
        let pairs = [
            (ScoreId::Acc, ScoreId::Err),
            (ScoreId::Sens, ScoreId::Fnr),
            (ScoreId::Spec, ScoreId::Fpr),
            (ScoreId::Ppv, ScoreId::Fdr),
            (ScoreId::Npv, ScoreId::For),
        ];
        for (x, y) in pairs {
            if let (Some(u), Some(v)) = (value(x, c), value(y, c)) {
                prop_assert_eq!(u + v, one.clone());
            }
        }
        if let (Some(s), Some(t), Some(bm)) = (value(ScoreId::Sens, c), value(ScoreId::Spec, c), value(ScoreId::Bm, c)) {
            prop_assert_eq!(s + t - &one, bm);
        }
    }

    #[test]
    fn score_of_means_equals_pooled(folds in prop::collection::vec(testset(8), 1..=3), report in small_report(any_id())) {
        let p: u64 = folds.iter().map(|f| f.p).sum();
        let n: u64 = folds.iter().map(|f| f.n).sum();
        let listed: Vec<_> = folds.iter().map(|f| json!({"p": f.p, "n": f.n})).collect();
        let e = Experiment::from_json(json!({
            "p": p, "n": n, "folding": {"kind": "known_folds", "folds": listed}, "fold_aggregation": "som",
        })).unwrap();
        let unc = Uncertainty::decimals(2);
        let pooled = check_single_testset(reduce_som(&folds), &report, &unc).unwrap();
        let via = check(&e, &report, &unc).unwrap();
        prop_assert_eq!(via.inconsistency, pooled.inconsistency);
        prop_assert_eq!(via.witness, pooled.witness);
    }

    #[test]
    fn unknown_folds_cover_stratified(p in 1u64..=7, n in 1u64..=7, k in 2u64..=3, report in small_report(linear_id())) {
        prop_assume!(k <= p.min(n));
        let unc = Uncertainty::decimals(2);
        let run = |kind: &str| {
            let e = Experiment::from_json(json!({
                "p": p, "n": n, "folding": {"kind": kind, "k": k}, "fold_aggregation": "mos",
            })).unwrap();
            check(&e, &report, &unc).unwrap().inconsistency
        };
        if !run("stratified_kfold") {
            prop_assert!(!run("unknown_folds_kfold"));
        }
    }

    #[test]
    fn checks_are_deterministic(s in spec(), report in small_report(linear_id())) {
        let e = Experiment::Classification(s);
        let unc = Uncertainty::decimals(2);
        let opts = CheckOptions { config_cap: 200, node_limit: 20_000 };
        let a = check_with(&e, &report, &unc, &opts).map(|r| serde_json::to_string(&r).unwrap());
        let b = check_with(&e, &report, &unc, &opts).map(|r| serde_json::to_string(&r).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn macro_witnesses_are_coherent(classes in prop::collection::vec(1u64..=5, 2..=4), report in small_report(linear_id())) {
        let m = MulticlassTestset::new(classes.clone());
        let res = check_multiclass_macro(&m, &report, &Uncertainty::decimals(2)).unwrap();
        if let Some(Witness::Single(Assignment::Matrix { matrix })) = res.witness {
            let total: u64 = classes.iter().sum();
            let trace: u64 = (0..classes.len()).map(|i| matrix[i][i]).sum();
            let fn_sum: u64 = (0..classes.len()).map(|i| classes[i] - matrix[i][i]).sum();
            let fp_sum: u64 = (0..classes.len())
                .map(|i| matrix.iter().map(|r| r[i]).sum::<u64>() - matrix[i][i])
                .sum();
            for (row, c) in matrix.iter().zip(&classes) {
                prop_assert_eq!(row.iter().sum::<u64>(), *c);
            }
            prop_assert_eq!(fn_sum, total - trace);
            prop_assert_eq!(fp_sum, total - trace);
        } else {
            prop_assert!(res.inconsistency);
        }
    }

    #[test]
    fn two_class_macro_sensitivity_is_balanced_accuracy(c0 in 1u64..=12, c1 in 1u64..=12, v in 0i64..=100, d in 2u32..=3) {
        let sens = report_of(vec![("sens", v * 10i64.pow(d - 2))], d);
        let bacc = report_of(vec![("bacc", v * 10i64.pow(d - 2))], d);
        let unc = Uncertainty::decimals(d);
        let macro_res = check_multiclass_macro(&MulticlassTestset::new(vec![c0, c1]), &sens, &unc).unwrap();
        let binary = check(&Experiment::Classification(ExperimentSpec::single(Testset::new(c0, c1))), &bacc, &unc).unwrap();
        prop_assert_eq!(macro_res.inconsistency, binary.inconsistency);
    }

    #[test]
    fn regression_pair_checks_are_interval_intersections(
        m in 0i64..=400, r in -400i64..=100, s in 0i64..=200, var in 1i64..=8,
    ) {
        let eps = Rational::new(1.into(), 100.into());
        let unc = Uncertainty::decimals(2);
        let ctx = RegressionContext { n_samples: None, target_variance: Some(num::int(var)) };
        let mse = Rational::new(m.into(), 100.into());
        let r2 = Rational::new(r.into(), 100.into());
        let rmse = Rational::new(s.into(), 100.into());
        let zero = Rational::zero();

        // mse and r2: the image of the mse interval under 1 - x / var meets the r2 interval
        let (mlo, mhi) = ((&mse - &eps).max(zero.clone()), &mse + &eps);
        let (rlo, rhi) = (&r2 - &eps, (&r2 + &eps).min(Rational::one()));
        let v = num::int(var);
        let image = (Rational::one() - &mhi / &v, Rational::one() - &mlo / &v);
        let expected = rlo <= rhi && image.0 <= rhi && rlo <= image.1;
        let res = check_regression(&ctx, &report_of(vec![("mse", m), ("r2", r)], 2), &unc).unwrap();
        prop_assert_eq!(!res.inconsistency, expected);

        // rmse and mse: the squared rmse interval meets the mse interval
        let (slo, shi) = ((&rmse - &eps).max(zero.clone()), &rmse + &eps);
        let expected = &slo * &slo <= mhi && mlo <= &shi * &shi;
        let res = check_regression(&ctx, &report_of(vec![("rmse", s), ("mse", m)], 2), &unc).unwrap();
        prop_assert_eq!(!res.inconsistency, expected);
    }

    #[test]
    fn bundle_check_is_check_of_loaded_spec(report in small_report(any_id())) {
        let unc = Uncertainty::decimals(2);
        for id in available_bundles() {
            let b = load_bundle(&id).unwrap();
            let direct = check(&Experiment::Classification(b.spec), &report, &unc).unwrap();
            prop_assert_eq!(check_bundle(&id, &report, &unc).unwrap(), direct);
        }
    }
}

#[test]
fn bundle_specs_validate_and_round_trip() {
    for id in available_bundles() {
        let b = load_bundle(&id).unwrap();
        b.spec.validate().unwrap();
        let e = Experiment::Classification(b.spec);
        let back = Experiment::from_json(serde_json::to_value(&e).unwrap()).unwrap();
        assert_eq!(back, e);
    }
}
