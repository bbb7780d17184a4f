use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aggmia::mlp::{encode_one_threshold, encode_two_threshold};
use tempfile::TempDir;

fn aggmia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aggmia")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, mechanism: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    let text = format!(
        r#"{{
  "data": {{"synthetic": {{"sites": 2, "epochs": 30, "traces": 200, "rate": 0.1}}}},
  "mechanism": {mechanism},
  "game": {{"attacker": "informed", "n_traces": 50, "target_observations": 20, "trials": 400,
           "attacks": ["one_threshold", "two_threshold"], "shadow_count": 200}}{extra}
}}"#
    );
    fs::write(&path, text).unwrap();
    path
}

const NOISELESS: &str = r#"{"family": "laplace", "noise_scale": 0.0}"#;
const LAPLACE: &str = r#"{"family": "laplace", "epsilon": 0.5, "clip_bound": 1}"#;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn noiseless_attack_is_perfect() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", NOISELESS, "");
    let out = dir.path().join("out");
    let o = aggmia(&["attack", "--config", s(&cfg), "--seed", "3", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.matches("accuracy=1.000").count(), 2, "{text}");
    for f in ["results.csv", "results.json", "roc.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn analytic_value_printed_next_to_accuracy() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", LAPLACE, "");
    let o = aggmia(&["attack", "--config", s(&cfg), "--seed", "9", "--out-dir", s(&dir.path().join("o"))]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.matches("analytic=").count(), 2, "{text}");
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", LAPLACE, "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(aggmia(&["attack", "--config", s(&cfg), "--seed", "11", "--out-dir", s(out)]).status.success());
    }
    for f in ["results.csv", "results.json", "roc.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", NOISELESS, "");
    let o = aggmia(&["attack", "--config", s(&cfg), "--out-dir", s(&dir.path().join("o"))]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().next().unwrap().starts_with("seed="));
}

#[test]
fn invalid_config_fails_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"family": "laplace", "epsilon": -1}"#, "");
    let out = dir.path().join("out");
    let o = aggmia(&["attack", "--config", s(&cfg), "--seed", "1", "--out-dir", s(&out)]);
    assert!(!o.status.success());
    assert!(!out.exists());

    let good = write_config(dir.path(), "good.json", LAPLACE, "");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, fs::read_to_string(&good).unwrap().replace("\"rate\": 0.1", "\"rates\": [0.1, 0.2]")).unwrap();
    let o = aggmia(&["generate", "--config", s(&bad), "--seed", "1", "--out-dir", s(&out)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("data.synthetic.rates"));
    assert!(!out.exists());
}

#[test]
fn too_few_traces_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", LAPLACE, "");
    let small = dir.path().join("small.json");
    fs::write(&small, fs::read_to_string(&cfg).unwrap().replace("\"n_traces\": 50", "\"n_traces\": 150")).unwrap();
    let out = dir.path().join("out");
    let o = aggmia(&["attack", "--config", s(&small), "--seed", "1", "--out-dir", s(&out)]);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn generate_writes_one_row_per_trace() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", LAPLACE, "");
    let path = dir.path().join("traces.csv");
    let o = aggmia(&["generate", "--config", s(&cfg), "--seed", "2", "--out", s(&path)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("n=200 L=2 E=30"));
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 201);

    let unwritable = dir.path().join("traces.csv").join("x.csv");
    assert!(!aggmia(&["generate", "--config", s(&cfg), "--seed", "2", "--out", s(&unwritable)]).status.success());
}

#[test]
fn bound_table() {
    let dir = TempDir::new().unwrap();
    let o = aggmia(&["bound", "--epsilon", "0.5", "--k-max", "40", "--out-dir", s(dir.path())]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\n1\t0.62246\n"), "{text}");
    let csv = fs::read_to_string(dir.path().join("bound.csv")).unwrap();
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 40);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));

    let o = aggmia(&["bound", "--epsilon", "0", "--k-max", "5", "--out-dir", s(dir.path())]);
    assert_eq!(stdout(&o).matches("\t0.50000").count(), 5);

    let o = aggmia(&["bound", "--epsilon=-0.5", "--k-max", "5", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_emits_row_per_k_and_attack() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", LAPLACE, r#", "sweep": {"k_grid": [5, 10, 15, 20, 25, 30]}"#);
    let out = dir.path().join("out");
    let o = aggmia(&["sweep", "--config", s(&cfg), "--seed", "4", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep_k.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 * 2);
    assert_eq!(fs::read_to_string(out.join("gap.csv")).unwrap().lines().count(), 1 + 6 * 2);

    let too_big = write_config(dir.path(), "big.json", LAPLACE, r#", "sweep": {"k_grid": [10, 40]}"#);
    let out = dir.path().join("big");
    let o = aggmia(&["sweep", "--config", s(&too_big), "--seed", "4", "--out-dir", s(&out)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep.k_grid"));
    assert!(!out.exists());
}

fn report_of(dir: &Path, model_json: String) -> serde_json::Value {
    let model = dir.join("model.json");
    fs::write(&model, model_json).unwrap();
    let o = aggmia(&["inspect-weights", "--model", s(&model), "--out-dir", s(dir)]);
    assert!(o.status.success());
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("weight_report.json")).unwrap()).unwrap();
    assert_eq!(printed, saved);
    printed
}

#[test]
fn inspect_encoded_models() {
    let dir = TempDir::new().unwrap();
    let two = encode_two_threshold(&[0.5, 0.4, 0.6, 0.5], 2.5, 50.0, 50.0).unwrap();
    let r = report_of(dir.path(), two.to_json().unwrap());
    assert_eq!(r["off_diagonal_mean_abs"], 0.0);

    let one = encode_one_threshold(5, 2.5, 50.0, 50.0).unwrap();
    let r = report_of(dir.path(), one.to_json().unwrap());
    assert_eq!(r["first_layer_cv"], 0.0);

    let o = aggmia(&["inspect-weights", "--model", s(&dir.path().join("missing.json"))]);
    assert!(!o.status.success());
}

#[test]
fn train_meta_exports_loadable_model() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", NOISELESS, "");
    let out = dir.path().join("out");
    let o = aggmia(&["train-meta", "--config", s(&cfg), "--seed", "5", "--out-dir", s(&out), "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let model = aggmia::mlp::MlpModel::from_json(&fs::read_to_string(out.join("meta_model.json")).unwrap()).unwrap();
    assert_eq!(model.n_in(), 20);
}
