//! The line-delimited JSON evaluation service, driven in-process and over
//! a local TCP socket.

use std::io::{BufRead, BufReader, Cursor, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use wlasso_hpo::harness::{serve_lines, serve_tcp};
use wlasso_hpo::Benchmark;

fn main() -> wlasso_hpo::Result<()> {
    let bench = Benchmark::preset("synt_simple")?;
    let z = vec![0.25; bench.d()];
    let requests = format!(
        "{}\n{}\n{}\n",
        r#"{"op":"info"}"#,
        serde_json::json!({"op": "eval", "z": z, "fidelity": {"discrete": 2}}),
        r#"{"op":"eval","z":[0.0]}"#,
    );
    let mut out = Vec::new();
    serve_lines(&bench, Cursor::new(requests), &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let shared = Arc::new(bench);
    thread::spawn(move || serve_tcp(shared, listener));

    let mut stream = TcpStream::connect(addr)?;
    let req = serde_json::json!({"op": "eval", "z": z, "fidelity": {"continuous": 0.5}});
    writeln!(stream, "{req}")?;
    let mut line = String::new();
    BufReader::new(stream).read_line(&mut line)?;
    print!("tcp {addr}: {line}");
    Ok(())
}
