use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bayes_rough::synth::SynthSpec;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bayes-rough"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        let spec = SynthSpec::checkerboard(2, 3, 0.1, 300, 3);
        f.write("spec.json", &serde_json::to_string_pretty(&spec).unwrap());
        ok(&f.run(&["synth", "--spec", "spec.json", "--out", "train.csv"]));
        f.write_config("run.json", json!({}));
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&self.read(name)).unwrap()
    }

    /// Base config merged with `chain` settings.
    fn write_config(&self, name: &str, chain: Value) {
        let mut chain_obj = json!({"burn_in": 20, "retain": 60, "seed": 1});
        for (k, v) in chain.as_object().unwrap() {
            chain_obj[k] = v.clone();
        }
        let config = json!({
            "data": "train.csv",
            "decision_column": "decision",
            "attributes": [
                {"name": "x1", "range": [0, 100]},
                {"name": "x2", "range": [0, 100]}
            ],
            "granules": 3,
            "chain": chain_obj,
            "output_dir": "out",
            "bins": 10
        });
        self.write(name, &serde_json::to_string_pretty(&config).unwrap());
    }

    fn run(&self, args: &[&str]) -> Output {
        bin(args, self.dir.path())
    }

    fn train(&self) {
        ok(&self.run(&["train", "--config", "run.json"]));
    }
}

#[test]
fn synth_is_reproducible_and_complete() {
    let f = Fixture::new();
    let first = f.read("train.csv");
    assert_eq!(first.lines().count(), 301);
    ok(&f.run(&[
        "synth",
        "--spec",
        "spec.json",
        "--out",
        "again.csv",
        "--truth",
        "t.json",
    ]));
    assert_eq!(first, f.read("again.csv"));
    let truth = f.json("train.truth.json");
    assert_eq!(truth["planted_cuts"]["x1"].as_array().unwrap().len(), 2);
    assert_eq!(truth, f.json("t.json"));
}

#[test]
fn synth_ten_thousand_rows() {
    let f = Fixture::new();
    let spec = SynthSpec::checkerboard(1, 2, 0.0, 10_000, 1);
    f.write("big.json", &serde_json::to_string(&spec).unwrap());
    ok(&f.run(&["synth", "--spec", "big.json", "--out", "big.csv"]));
    assert_eq!(f.read("big.csv").lines().count(), 10_001);
}

#[test]
fn train_writes_artifacts() {
    let f = Fixture::new();
    let out = f.run(&["train", "--config", "run.json"]);
    ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("mean accuracy"));
    assert!(stdout.contains("mean rule count"));
    assert!(stdout.contains("acceptance rate"));
    assert_eq!(f.read("out/trace.csv").lines().count(), 61);
    for name in [
        "chain.json",
        "diagnostics.json",
        "hist_rules.csv",
        "hist_accuracy.csv",
        "clean_report.json",
    ] {
        assert!(f.path("out").join(name).exists(), "{name}");
    }
    let leftovers: Vec<_> = fs::read_dir(f.path("out"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with(".staging")
        })
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn flags_override_config() {
    let f = Fixture::new();
    ok(&f.run(&[
        "train",
        "--config",
        "run.json",
        "--retain",
        "7",
        "--burn-in",
        "3",
        "--seed",
        "9",
        "--k",
        "2",
        "--lambda",
        "0.2",
        "--out",
        "flagged",
    ]));
    assert_eq!(f.read("flagged/trace.csv").lines().count(), 8);
    let chain = f.json("flagged/chain.json");
    assert_eq!(chain["chain"]["config"]["seed"], 9);
    assert_eq!(chain["chain"]["config"]["lambda"], 0.2);
    assert_eq!(chain["chain"]["granule_counts"], json!([2, 2]));
}

#[test]
fn concurrent_chains_write_separate_traces() {
    let f = Fixture::new();
    ok(&f.run(&["train", "--config", "run.json", "--chains", "3"]));
    let traces: Vec<String> = (0..3)
        .map(|i| f.read(&format!("out/chain_{i}/trace.csv")))
        .collect();
    assert_ne!(traces[0], traces[1]);
    assert_ne!(traces[1], traces[2]);
}

#[test]
fn negative_lambda_exits_two_without_outputs() {
    let f = Fixture::new();
    f.write_config("bad.json", json!({"lambda": -0.1}));
    let out = f.run(&["train", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!f.path("out").exists());
    let out = f.run(&["train", "--config", "run.json", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!f.path("out").exists());
}

#[test]
fn malformed_config_exits_two() {
    let f = Fixture::new();
    f.write("broken.json", "{\"data\": ");
    assert_eq!(
        f.run(&["train", "--config", "broken.json"]).status.code(),
        Some(2)
    );
    f.write_config("k.json", json!({}));
    assert_eq!(
        f.run(&["train", "--config", "k.json", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn runtime_failure_exits_one_and_removes_outputs() {
    let f = Fixture::new();
    let mut data = f.read("train.csv");
    data.push_str("50,50,7\n");
    f.write("train.csv", &data);
    let out = f.run(&["train", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!f.path("out").exists());
}

#[test]
fn predict_on_training_rows_matches_chain_accuracy() {
    let f = Fixture::new();
    f.train();
    ok(&f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "train.csv",
        "--out",
        "pred",
    ]));
    let summary = f.json("pred/predictions_summary.json");
    let model = summary["mean_model_accuracy"].as_f64().unwrap();
    let chain = summary["chain_mean_accuracy"].as_f64().unwrap();
    assert!((model - chain).abs() <= 1e-12, "{model} vs {chain}");
    assert_eq!(summary["queries"], 300);
    let table = f.read("pred/predictions.csv");
    assert_eq!(table.lines().count(), 301);
    let pred_files = fs::read_dir(f.path("pred"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("pred_")
        })
        .count();
    assert_eq!(pred_files, 300);
}

#[test]
fn predict_unlabeled_batch() {
    let f = Fixture::new();
    f.train();
    f.write("q.csv", "id,x1,x2\na,10,10\nb,50,90\nc,100,0\n");
    ok(&f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "q.csv",
        "--out",
        "pred",
    ]));
    for id in ["a", "b", "c"] {
        let hist = f.read(&format!("pred/pred_{id}.csv"));
        assert!(hist.starts_with("bin_lo,bin_hi,count"));
    }
    let summary = f.json("pred/predictions_summary.json");
    assert!(summary["mean_model_accuracy"].is_null());
    for line in f.read("pred/predictions.csv").lines().skip(1) {
        let mean: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((-1.0..=1.0).contains(&mean));
    }
}

#[test]
fn certain_positive_region_predicts_one() {
    let f = Fixture::new();
    let mut data = String::from("x1,x2,decision\n");
    for i in 0..50 {
        data.push_str(&format!("{},{},1\n", i * 2, 100 - i * 2));
    }
    f.write("train.csv", &data);
    f.train();
    f.write("q.csv", "x1,x2\n33,47\n");
    ok(&f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "q.csv",
        "--out",
        "pred",
    ]));
    let row = f.read("pred/predictions.csv");
    let fields: Vec<&str> = row.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[1], "1");
}

#[test]
fn empty_query_file_warns_and_succeeds() {
    let f = Fixture::new();
    f.train();
    f.write("empty.csv", "");
    let out = f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "empty.csv",
        "--out",
        "pred",
    ]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no queries"));
    assert_eq!(f.read("pred/predictions.csv").lines().count(), 1);

    f.write("header.csv", "x1,x2\n");
    ok(&f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "header.csv",
        "--out",
        "pred2",
    ]));
}

#[test]
fn schema_mismatch_is_rejected() {
    let f = Fixture::new();
    f.train();
    f.write("q.csv", "x1,other\n1,2\n");
    let out = f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "q.csv",
        "--out",
        "pred",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x2"));
    assert!(!f.path("pred").exists());
}

#[test]
fn rules_render_map_model() {
    let f = Fixture::new();
    f.train();
    let out = f.run(&["rules", "--chain", "out/chain.json"]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Lower Approximation Rules"));
    assert!(text.contains("Upper Approximation Rules"));

    let chain = f.json("out/chain.json");
    let retained = chain["chain"]["retained"].as_array().unwrap();
    let best = retained
        .iter()
        .map(|m| m["log_posterior"].as_f64().unwrap())
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |b, (i, lp)| if lp > b.1 { (i, lp) } else { b },
        );
    let n = retained[best.0]["rule_count"].as_u64().unwrap();
    assert!(text.contains(&format!("Rule set: N = {n} ")), "{text}");

    ok(&f.run(&["rules", "--chain", "out/chain.json", "--out", "rules.txt"]));
    assert_eq!(f.read("rules.txt"), text);
}

#[test]
fn corrupted_chain_is_a_parse_error() {
    let f = Fixture::new();
    f.train();
    let text = f.read("out/chain.json");
    f.write("bad.json", &text[..text.len() / 2]);
    let out = f.run(&["rules", "--chain", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("json"));
}

#[test]
fn report_bundle() {
    let f = Fixture::new();
    f.train();
    f.write("q.csv", "id,x1,x2\nq1,5,5\nq2,95,40\n");
    ok(&f.run(&[
        "report",
        "--chain",
        "out/chain.json",
        "--queries",
        "q.csv",
        "--out",
        "rep",
        "--bins",
        "8",
    ]));
    for name in [
        "rules_map.txt",
        "hist_rules.csv",
        "hist_accuracy.csv",
        "pred_q1.csv",
        "pred_q2.csv",
        "summary.json",
    ] {
        assert!(f.path("rep").join(name).exists(), "{name}");
    }
    let summary = f.json("rep/summary.json");
    assert_eq!(summary["retained"], 60);
    assert_eq!(summary["queries"].as_array().unwrap().len(), 2);
}

#[test]
fn cleaning_applies_to_queries() {
    let f = Fixture::new();
    let mut config: Value = f.json("run.json");
    config["predicates"] = json!([{
        "name": "corner",
        "all_of": [{"attribute": "x1", "op": "<", "value": 1}]
    }]);
    f.write("run.json", &config.to_string());
    f.train();
    let report = f.json("out/clean_report.json");
    assert!(report["per_predicate"]["corner"].is_u64());
    f.write("q.csv", "x1,x2,decision\n0.5,50,1\n50,50,0\n");
    ok(&f.run(&[
        "predict",
        "--chain",
        "out/chain.json",
        "--queries",
        "q.csv",
        "--out",
        "pred",
    ]));
    let summary = f.json("pred/predictions_summary.json");
    assert_eq!(summary["queries"], 1);
    assert_eq!(summary["removed"], 1);
}

#[test]
fn missing_subcommand_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&[], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["train"], dir.path()).status.code(), Some(2));
}
