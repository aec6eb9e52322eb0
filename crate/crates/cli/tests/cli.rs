use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scoresleuth"))
}

fn write(dir: &TempDir, name: &str, v: Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn verdict(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn example_files(acc: &str, p: u64) -> (TempDir, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", serde_json::json!({"p": p, "n": 1000}));
    let scores = write(&dir, "scores.json", serde_json::json!({"acc": acc, "sens": "0.81", "f1": "0.4894"}));
    (dir, spec, scores)
}

#[test]
fn check_consistent_and_inconsistent() {
    let (_d, spec, scores) = example_files("0.8464", 100);
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = verdict(&out);
    assert_eq!(v["inconsistency"], false);
    assert_eq!(v["witness"]["single"]["tp"], 81);
    assert_eq!(v["witness"]["single"]["tn"], 850);

    let (_d, spec, scores) = example_files("0.8474", 100);
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(verdict(&out)["inconsistency"], true);

    let (_d, spec, scores) = example_files("0.8464", 110);
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--infer-eps"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_eps_is_usage_error() {
    let (_d, spec, scores) = example_files("0.8464", 100);
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eps"));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "1e-4", "--infer-eps"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", serde_json::json!({"p": 0, "n": 0}));
    let scores = write(&dir, "scores.json", serde_json::json!({"acc": "0.5"}));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(2));

    let spec = write(&dir, "spec2.json", serde_json::json!({"p": 5, "n": 5}));
    let bad = write(&dir, "bad.json", serde_json::json!({"nope": "0.5"}));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&bad), "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown score id"));

    let numeric = write(&dir, "num.json", serde_json::json!({"acc": 0.5}));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&numeric), "--infer-eps"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&numeric), "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "-0.01"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundle_command() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.json", serde_json::json!({"acc": "0.7916", "sens": "0.2933", "spec": "0.9145"}));
    let bad = write(&dir, "bad.json", serde_json::json!({"acc": "0.7926", "sens": "0.2933", "spec": "0.9145"}));
    let out = run(&["bundle", "--name", "isic2016", "--scores", path(&ok), "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["bundle", "--name", "isic2016", "--scores", path(&bad), "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["bundle", "--name", "bogus", "--scores", path(&ok), "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("isic2016"));
}

#[test]
fn list_command() {
    let lines = |flag: &str| -> Vec<Value> {
        let out = run(&["list", flag]);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect()
    };
    let scores = lines("--scores");
    assert_eq!(scores.len(), 20);
    for id in ["acc", "f1"] {
        assert!(scores.iter().any(|s| s["id"] == id));
    }
    assert!(lines("--bundles").iter().any(|b| b["id"] == "isic2016"));
    let procs = lines("--procedures");
    for id in ["single_testset", "mos_known_folds", "regression"] {
        assert!(procs.iter().any(|p| p["id"] == id));
    }
    let out = run(&["list", "--scores", "--all"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 22);
}

#[test]
fn resource_refusal_exit_3() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "spec.json",
        serde_json::json!({"p": 6, "n": 6, "folding": {"kind": "unknown_folds_kfold", "k": 3}, "fold_aggregation": "mos"}),
    );
    let scores = write(&dir, "scores.json", serde_json::json!({"acc": "0.5"}));
    let out = bin()
        .args(["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "0.01"])
        .env("SCORESLEUTH_CONFIG_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(verdict(&out)["procedure"], "mos_unknown_folds");
}

#[test]
fn exit_code_matches_verdict_and_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", serde_json::json!({"p": 20, "n": 30}));
    for (i, acc) in ["0.5", "0.52", "0.333", "0.9"].iter().enumerate() {
        let scores = write(&dir, &format!("s{i}.json"), serde_json::json!({"acc": acc, "sens": "0.4"}));
        let a = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--infer-eps"]);
        let b = run(&["check", "--spec", path(&spec), "--scores", path(&scores), "--infer-eps"]);
        assert_eq!(a.stdout, b.stdout);
        let inconsistent = verdict(&a)["inconsistency"].as_bool().unwrap();
        assert_eq!(a.status.code(), Some(if inconsistent { 1 } else { 0 }));
    }
}

#[test]
fn out_file_and_regression() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "spec.json", serde_json::json!({"task": "regression", "target_variance": "4"}));
    let scores = write(&dir, "scores.json", serde_json::json!({"mse": "1.0", "r2": "0.8"}));
    let out_path = dir.path().join("verdict.json");
    let out = run(&[
        "check", "--spec", path(&spec), "--scores", path(&scores), "--eps", "1e-4", "--out", path(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["procedure"], "regression");
    assert_eq!(v["evidence"]["finding"]["relation"], "r2_eq_one_minus_mse_over_variance");
}
