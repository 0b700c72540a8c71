use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::benchmark::Benchmark;
use crate::error::Result;
use crate::fidelity::Fidelity;

#[derive(Deserialize)]
struct Request {
    op: String,
    #[serde(default)]
    z: Option<Vec<f64>>,
    #[serde(default)]
    fidelity: Option<Value>,
}

fn error(kind: &str, message: impl Into<String>) -> Value {
    json!({ "error": kind, "message": message.into() })
}

/// Answers one protocol line. Never fails: problems become error responses.
pub fn handle_request(bench: &Benchmark, line: &str) -> Value {
    let req: Request = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => return error("parse", e.to_string()),
    };
    match req.op.as_str() {
        "info" => {
            let (lo, hi) = bench.bounds();
            json!({
                "name": bench.name(),
                "d": bench.d(),
                "bounds": [-1.0, 1.0],
                "lam_bounds": [lo, hi],
                "fidelity": bench.fidelity(),
            })
        }
        "eval" => eval(bench, req),
        other => error("unknown_op", format!("unknown op {other:?}")),
    }
}

fn eval(bench: &Benchmark, req: Request) -> Value {
    let Some(z) = req.z else {
        return error("invalid", "eval needs a z vector");
    };
    if z.len() != bench.d() {
        return json!({
            "error": "dimension",
            "expected": bench.d(),
            "got": z.len(),
        });
    }
    let fidelity = match req.fidelity {
        None => Fidelity::HIGHEST,
        Some(v) => match serde_json::from_value::<Fidelity>(v) {
            Ok(f) => f,
            Err(e) => return error("fidelity", e.to_string()),
        },
    };
    if let Err(e) = fidelity.tolerance() {
        return error("fidelity", e.to_string());
    }
    match bench.evaluate_point(&z, fidelity) {
        Ok(p) => json!({
            "loss": p.value.objective(),
            "raw_loss": p.value.loss,
            "cost_units": p.value.cost,
            "clipped": p.clipped,
        }),
        Err(e) => error("evaluation", e.to_string()),
    }
}

/// Serves newline-delimited JSON until the reader is exhausted. Blank lines
/// are ignored.
pub fn serve_lines<R: BufRead, W: Write>(bench: &Benchmark, reader: R, mut writer: W) -> Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = handle_request(bench, &line);
        serde_json::to_writer(&mut writer, &resp)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
    Ok(())
}

pub fn serve_stdio(bench: &Benchmark) -> Result<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve_lines(bench, stdin.lock(), BufWriter::new(stdout.lock()))
}

fn serve_connection(bench: &Benchmark, stream: TcpStream) -> Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_lines(bench, reader, BufWriter::new(stream))
}

/// Accepts connections forever, one thread each.
pub fn serve_tcp(bench: Arc<Benchmark>, listener: TcpListener) -> Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let bench = Arc::clone(&bench);
        thread::spawn(move || {
            if let Err(e) = serve_connection(&bench, stream) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}
