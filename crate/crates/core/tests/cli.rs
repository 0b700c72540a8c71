use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn wlhpo(data_dir: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wlhpo"));
    cmd.env_remove("WLHPO_DATA_DIR").args(args);
    if let Some(d) = data_dir {
        cmd.env("WLHPO_DATA_DIR", d);
    }
    cmd.output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn bounds_and_eval() {
    let o = wlhpo(None, &["bounds", "--benchmark", "synt_simple"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let (lo, hi) = (v["lam_min"].as_f64().unwrap(), v["lam_max"].as_f64().unwrap());
    assert!((hi - lo - 2.0 * 10f64.ln()).abs() < 1e-12);

    let o = wlhpo(None, &["eval", "--benchmark", "synt_simple", "--z", "default"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json_out(&o)["loss"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["eval", "--benchmark", "synt_simple", "--z", "[0.0]"],
        &["eval", "--benchmark", "synt_simple", "--z", "default", "--fidelity", r#"{"discrete":7}"#],
        &["bounds", "--benchmark", "no_such_benchmark"],
        &["bounds", "--benchmark", "diabetes"],
        &["generate", "--preset", "synt_simple"],
        &["export", "--runs", "/nonexistent", "--axis", "sideways"],
    ];
    for args in cases {
        assert_eq!(wlhpo(None, args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn missing_data_file_is_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlhpo(Some(dir.path()), &["bounds", "--benchmark", "diabetes"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn generate_run_export() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlhpo(Some(dir.path()), &["generate", "--preset", "synt_simple"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = dir.path().join("synt_simple.manifest.json");
    for f in ["synt_simple.manifest.json", "synt_simple.svm", "synt_simple.beta.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }

    let exp = dir.path().join("exp.json");
    let bench: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let m = serde_json::json!({
        "benchmark": bench,
        "method": {"name": "random_search"},
        "budget": 4,
        "repetitions": 2,
    });
    std::fs::write(&exp, m.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = wlhpo(
        Some(dir.path()),
        &["run", "--manifest", exp.to_str().unwrap(), "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_out(&o)["best"].as_array().unwrap().len(), 2);

    let o = wlhpo(None, &["export", "--runs", out.to_str().unwrap(), "--axis", "cost"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("cost_units,best_so_far_mean"));
    assert_eq!(csv.lines().count(), 1 + 8);

    // The benchmark given by file evaluates like the built-in preset.
    let a = wlhpo(Some(dir.path()), &["eval", "--benchmark", manifest.to_str().unwrap(), "--z", "default"]);
    let b = wlhpo(None, &["eval", "--benchmark", "synt_simple", "--z", "default"]);
    assert_eq!(json_out(&a)["loss"], json_out(&b)["loss"]);
}

#[test]
fn failed_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("exp.json");
    std::fs::write(
        &exp,
        r#"{"benchmark":"synt_simple","method":{"name":"cmaes"},"budget":5,"repetitions":1}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = wlhpo(None, &["run", "--manifest", exp.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(out.join("rep_000.failed").is_file());
}

#[test]
fn serve_stdio_answers_each_line() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wlhpo"))
        .args(["serve", "--benchmark", "synt_simple", "--transport", "stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut stdin = child.stdin.take().unwrap();
        writeln!(stdin, r#"{{"op":"info"}}"#).unwrap();
        writeln!(stdin, r#"{{"op":"eval","z":[0.1]}}"#).unwrap();
        writeln!(stdin, "not json").unwrap();
    }
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["d"], 60);
    assert_eq!(lines[1]["error"], "dimension");
    assert_eq!(lines[2]["error"], "parse");
}

#[test]
fn estimate_de_and_fidelity_corr() {
    let o = wlhpo(None, &["estimate-de", "--benchmark", "synt_simple", "--budget", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json_out(&o)["d_e_hat"].as_u64().is_some());
    let o = wlhpo(None, &["fidelity-corr", "--benchmark", "synt_simple", "--probes", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["matrix"][0][0], 1.0);
    let o = wlhpo(None, &["fidelity-corr", "--benchmark", "synt_simple", "--probes", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
