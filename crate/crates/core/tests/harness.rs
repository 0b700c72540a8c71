mod common;

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde_json::{json, Value};
use wlasso_hpo::benchgen::SyntheticSpec;
use wlasso_hpo::harness::{
    export_plotdata, fidelity_correlation, handle_request, load_runs, read_summary, read_trajectory,
    repetition_file, run_experiment, run_experiment_on, serve_lines, serve_tcp, Axis, BenchmarkRef,
    ExperimentManifest, Method,
};
use wlasso_hpo::optimizers::CmaConfig;
use wlasso_hpo::record::EvalRecord;
use wlasso_hpo::{Benchmark, Fidelity};

fn small() -> Benchmark {
    Benchmark::synthetic("small", &SyntheticSpec::new(30, 10, 2)).unwrap()
}

fn random_manifest(reps: usize, budget: usize) -> ExperimentManifest {
    ExperimentManifest {
        benchmark: BenchmarkRef::Name("synt_simple".into()),
        method: Method::RandomSearch {
            fidelity: Fidelity::HIGHEST,
        },
        budget,
        repetitions: reps,
        base_seed: 11,
        record_wall_time: false,
    }
}

#[test]
fn experiment_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment(&random_manifest(2, 3), None, dir.path()).unwrap();
    assert!(summary.complete());
    assert_eq!(summary.best.len(), 2);
    for rep in 0..2 {
        let t = read_trajectory(&repetition_file(dir.path(), rep)).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|r| r.seed == 11 + rep as u64 && r.wall_ns == 0));
        let best = t.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min);
        assert_eq!(best, summary.best[rep]);
    }
    let (a, b) = (summary.best[0], summary.best[1]);
    assert_eq!(summary.mean, Some((a + b) / 2.0));
    assert!((summary.std.unwrap() - (a - b).abs() / 2.0).abs() < 1e-12);
    assert_eq!(read_summary(dir.path()).unwrap(), summary);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = random_manifest(2, 4);
    run_experiment(&m, None, a.path()).unwrap();
    run_experiment(&m, None, b.path()).unwrap();
    for name in ["rep_000.jsonl", "rep_001.jsonl", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn grid_methods_have_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let m = ExperimentManifest {
        method: Method::LassoCv { n_points: 10 },
        repetitions: 3,
        ..random_manifest(3, 10)
    };
    let s = run_experiment_on(&small(), &m, dir.path()).unwrap();
    assert_eq!(s.std, Some(0.0));
    assert!(s.best.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn failed_repetitions_leave_markers() {
    let dir = tempfile::tempdir().unwrap();
    let m = ExperimentManifest {
        method: Method::Cmaes(CmaConfig::default()),
        ..random_manifest(2, 5)
    };
    let s = run_experiment_on(&small(), &m, dir.path()).unwrap();
    assert!(!s.complete());
    assert_eq!(s.failures.len(), 2);
    assert!(s.best.is_empty() && s.mean.is_none());
    assert!(dir.path().join("rep_000.failed").is_file());
    assert!(!dir.path().join("rep_000.jsonl").exists());
    assert!(dir.path().join("summary.json").is_file());
}

#[test]
fn wall_time_is_recorded_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let m = ExperimentManifest {
        record_wall_time: true,
        ..random_manifest(1, 5)
    };
    run_experiment(&m, None, dir.path()).unwrap();
    let t = read_trajectory(&repetition_file(dir.path(), 0)).unwrap();
    assert!(t.iter().all(|r| r.wall_ns > 0));
    assert!(t.windows(2).all(|w| w[1].wall_ns >= w[0].wall_ns));
    let csv = export_plotdata(&[t], Axis::Wall).unwrap();
    assert!(csv.starts_with("wall_ns,"));
}

#[test]
fn record_json_round_trip() {
    let r = EvalRecord {
        z: vec![0.1, -1.0, 1.0 / 3.0],
        fidelity: Fidelity::Continuous(0.25),
        loss: 1.234_567_890_123_456_7,
        raw_loss: 0.1 + 0.2,
        cost_units: 123_456_789_012,
        wall_ns: 0,
        seed: u64::MAX,
        ordinal: 7,
    };
    let back: EvalRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn export_rejects_mixed_benchmarks() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&random_manifest(1, 2), None, a.path()).unwrap();
    run_experiment_on(&small(), &random_manifest(1, 2), b.path()).unwrap();
    assert!(load_runs(&[a.path().to_path_buf(), b.path().to_path_buf()]).is_err());
    let runs = load_runs(&[a.path().to_path_buf()]).unwrap();
    let csv = export_plotdata(&runs, Axis::Ordinal).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn service_info_and_errors() {
    let b = small();
    let info = handle_request(&b, r#"{"op":"info"}"#);
    assert_eq!(info["d"], 10);
    assert_eq!(info["bounds"], json!([-1.0, 1.0]));
    let (lo, hi) = b.bounds();
    assert_eq!(info["lam_bounds"], json!([lo, hi]));

    let dim = handle_request(&b, r#"{"op":"eval","z":[0.0,0.0]}"#);
    assert_eq!(dim, json!({"error": "dimension", "expected": 10, "got": 2}));
    let z = vec![0.0; 10];
    let bad = handle_request(&b, &json!({"op":"eval","z":z,"fidelity":{"discrete":9}}).to_string());
    assert_eq!(bad["error"], "fidelity");
    assert_eq!(handle_request(&b, "{oops")["error"], "parse");
    assert_eq!(handle_request(&b, r#"{"op":"train"}"#)["error"], "unknown_op");
}

#[test]
fn service_is_pure() {
    let b = small();
    let req = json!({"op":"eval","z":vec![0.3; 10],"fidelity":{"discrete":2}}).to_string();
    let first = handle_request(&b, &req);
    handle_request(&b, &json!({"op":"eval","z":vec![-0.7; 10]}).to_string());
    assert_eq!(handle_request(&b, &req), first);
    let direct = b.evaluate_point(&[0.3; 10], Fidelity::Discrete(2)).unwrap();
    assert_eq!(first["raw_loss"].as_f64().unwrap(), direct.value.loss);
    assert_eq!(first["cost_units"].as_u64().unwrap(), direct.value.cost);
}

#[test]
fn service_lines_skip_blanks() {
    let b = small();
    let input = "{\"op\":\"info\"}\n\n   \n{\"op\":\"x\"}\n";
    let mut out = Vec::new();
    serve_lines(&b, input.as_bytes(), &mut out).unwrap();
    let lines: Vec<Value> = out
        .split(|c| *c == b'\n')
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_slice(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["error"], "unknown_op");
}

#[test]
fn tcp_serves_concurrent_clients() {
    let b = Arc::new(small());
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = Arc::clone(&b);
    thread::spawn(move || serve_tcp(server, listener));

    let client = move |z: f64| {
        let stream = TcpStream::connect(addr).unwrap();
        let mut writer = stream.try_clone().unwrap();
        let mut reader = BufReader::new(stream);
        let mut losses = Vec::new();
        for k in 0..5 {
            let req = json!({"op":"eval","z":vec![z - 0.1 * k as f64; 10]});
            writeln!(writer, "{req}").unwrap();
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let v: Value = serde_json::from_str(&line).unwrap();
            losses.push(v["loss"].as_f64().unwrap());
        }
        losses
    };
    let a = thread::spawn(move || client(0.5));
    let c = client(0.2);
    let a = a.join().unwrap();
    for (k, (la, lc)) in a.iter().zip(&c).enumerate() {
        let za = vec![0.5 - 0.1 * k as f64; 10];
        let zc = vec![0.2 - 0.1 * k as f64; 10];
        assert_eq!(*la, b.evaluate_point(&za, Fidelity::HIGHEST).unwrap().value.objective());
        assert_eq!(*lc, b.evaluate_point(&zc, Fidelity::HIGHEST).unwrap().value.objective());
    }
}

#[test]
fn correlation_matrix_shape() {
    let m = fidelity_correlation(&small(), 8, 1).unwrap();
    assert_eq!(m.levels.len(), 5);
    assert_eq!(m.losses.len(), 8);
    for a in 0..5 {
        assert_eq!(m.get(a, a), Some(1.0));
        for c in 0..5 {
            assert_eq!(m.get(a, c), m.get(c, a));
        }
    }
    assert!(fidelity_correlation(&small(), 2, 1).is_err());
}
