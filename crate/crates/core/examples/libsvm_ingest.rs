//! Parse LIBSVM text, write it back, and list the registered real datasets.
//! Real files are looked up in `$WLHPO_DATA_DIR`.

use std::io::Cursor;

use wlasso_hpo::ingest::{parse_libsvm, registry, write_libsvm, DATA_DIR_ENV};
use wlasso_hpo::Benchmark;

const TEXT: &str = "\
# label idx:value ...
1 1:0.5 3:-1.25
-1 2:2

0.5 1:1 2:1 3:1
";

fn main() -> wlasso_hpo::Result<()> {
    let parsed = parse_libsvm(Cursor::new(TEXT))?;
    println!("{} rows, {} features, labels {:?}", parsed.n(), parsed.d, parsed.y);
    let ds = parsed.into_dataset("inline", 3)?;
    let mut out = Vec::new();
    write_libsvm(&ds, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    match parse_libsvm(Cursor::new("1 3:1 2:1\n")) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::var_os(DATA_DIR_ENV).map(std::path::PathBuf::from);
    for entry in registry() {
        let path = entry.resolve_source(dir.as_deref());
        let status = if path.is_file() {
            match Benchmark::real(&entry, dir.as_deref()) {
                Ok(b) => format!("loaded, bounds {:?}", b.bounds()),
                Err(e) => format!("failed: {e}"),
            }
        } else {
            "not present".to_string()
        };
        println!("{:14} {:6} x {:6}  {}  ({status})", entry.name, entry.n, entry.d, path.display());
    }
    Ok(())
}
