use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_classfield")).args(args).output().expect("binary runs")
}

fn run_fixture(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn status<'a>(v: &'a Value, name: &str) -> Option<&'a str> {
    v["checks"].as_array()?.iter().find(|c| c["name"] == name)?["status"].as_str()
}

#[test]
fn s3_summary() {
    let out = run_fixture("group", "group_s3.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["order"], 6);
    assert_eq!(v["subgroups"]["count"], 6);
    assert_eq!(v["subgroups"]["normal"], 3);
    assert_eq!(v["abelianization"]["invariant_factors"], serde_json::json!([2]));
    assert_eq!(v["transfers"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_table_exits_2() {
    let out = run_fixture("group", "group_bad_table.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inverse"));
}

#[test]
fn unparsable_input_exits_2() {
    let dir = std::env::temp_dir().join(format!("classfield-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{\"group\": ").unwrap();
    let out = run(&["group", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["group", "--input", dir.join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["group"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scenario_missing_valuation_exits_2() {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("cft_cyclic_c2.json")).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("valuation");
    let dir = std::env::temp_dir().join(format!("classfield-cli-nv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scenario.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["cft", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mackey_abelianization_passes() {
    let out = run_fixture("mackey", "mackey_d4_abelianization.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for name in ["triviality", "transitivity", "equivariance", "stability", "mackey_formula", "cohomological"] {
        assert_eq!(status(&v, name), Some("pass"), "{name}");
    }
}

#[test]
fn bundled_scenarios() {
    for name in ["cyclic_c2", "cyclic_c3", "cyclic_c4", "cyclic_c5", "cyclic_c8", "cyclic_c9", "klein_projection"] {
        let out = run_fixture("cft", &format!("cft_{name}.json"), &[]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert!(!v["tables"].as_array().unwrap().is_empty(), "{name}");
    }
}

#[test]
fn negation_scenario_fails_validation_and_can_be_forced() {
    let out = run_fixture("cft", "cft_negation_c2.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(status(&v, "fnd.exact"), Some("fail"));
    assert_eq!(status(&v, "upsilon"), Some("skip"));

    let out = run_fixture("cft", "cft_negation_c2.json", &["--certify"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(!v["tables"].as_array().unwrap().is_empty());
}

#[test]
fn hrv_valuations() {
    let out = run_fixture("hrv", "hrv_elements.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["elements"][0]["value"], serde_json::json!([1, 0]));
    assert_eq!(v["elements"][0]["projected"], serde_json::json!([0]));
    assert_eq!(v["elements"][1]["value"], serde_json::json!([2, -1, 1]));

    let out = run_fixture("hrv", "hrv_zero.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(status(&json(&out), "element[0].valuation"), Some("fail"));
}

#[test]
fn output_is_deterministic() {
    for (cmd, name) in [("cft", "cft_klein_projection.json"), ("hrv", "hrv_elements.json"), ("group", "group_s3.json")]
    {
        let a = run_fixture(cmd, name, &["--seed", "7"]);
        let b = run_fixture(cmd, name, &["--seed", "7"]);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn text_format_and_out_file() {
    let dir = std::env::temp_dir().join(format!("classfield-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let out = run_fixture("group", "group_s3.json", &["--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("PASS  transfer[0].homomorphism"));
    assert!(text.starts_with("abelian: false"));
}
