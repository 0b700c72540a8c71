//! LIBSVM parsing and the registry of real-world regression datasets.
//!
//! Grammar, one record per line:
//!
//! ```text
//! line  := label (SP index ":" value)* EOL
//! label := decimal float
//! index := positive integer, strictly increasing within the line
//! value := decimal float
//! ```
//!
//! Blank lines are skipped and `#` starts a comment running to the end of the
//! line. Explicit zero values are dropped.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchgen::BoundsKind;
use crate::error::{Error, Result};
use crate::lasso::Dataset;

/// Environment variable naming the directory holding real-world data files.
pub const DATA_DIR_ENV: &str = "WLHPO_DATA_DIR";

/// Datasets with at most this many features are stored densely.
pub const DENSE_MAX_FEATURES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmRecord {
    pub label: f64,
    /// `(1-based index, value)`, strictly increasing by index.
    pub entries: Vec<(usize, f64)>,
}

/// Parses one line. Returns `None` for blank or comment-only lines.
pub fn parse_record(line: &str, line_no: usize) -> Result<Option<LibsvmRecord>> {
    let content = match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    };
    let mut tokens = content.split_ascii_whitespace();
    let Some(label_tok) = tokens.next() else {
        return Ok(None);
    };
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let label = parse_float(label_tok).ok_or_else(|| err(format!("bad label {label_tok:?}")))?;
    let mut entries = Vec::new();
    let mut last = 0usize;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("token {tok:?} is not index:value")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| err(format!("bad index in {tok:?}")))?;
        if idx == 0 {
            return Err(err(format!("index must be positive in {tok:?}")));
        }
        if idx <= last {
            return Err(err(format!("index {idx} does not increase (previous {last})")));
        }
        last = idx;
        let value = parse_float(val).ok_or_else(|| err(format!("bad value in {tok:?}")))?;
        if value != 0.0 {
            entries.push((idx, value));
        }
    }
    Ok(Some(LibsvmRecord { label, entries }))
}

fn parse_float(tok: &str) -> Option<f64> {
    let v: f64 = tok.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Row-compressed output of the parser; column indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub y: Vec<f64>,
    /// One past the largest column index seen.
    pub d: usize,
}

impl LibsvmData {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    /// Converts to a CSC dataset with `d` columns (`d` at least the observed width).
    pub fn into_dataset(self, name: &str, d: usize) -> Result<Dataset> {
        let n = self.n();
        if d < self.d {
            return Err(Error::Invalid(format!("requested d = {d} below observed {}", self.d)));
        }
        let mut counts = vec![0usize; d + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..d {
            counts[j + 1] += counts[j];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut rows = vec![0usize; self.indices.len()];
        let mut vals = vec![0.0; self.indices.len()];
        for i in 0..n {
            for (j, v) in self.row(i) {
                rows[next[j]] = i;
                vals[next[j]] = v;
                next[j] += 1;
            }
        }
        Dataset::from_csc(name, n, d, indptr, rows, vals, self.y)
    }
}

/// Streams LIBSVM text, keeping only the sparse accumulation in memory.
pub fn parse_libsvm<R: BufRead>(mut reader: R) -> Result<LibsvmData> {
    let mut out = LibsvmData {
        indptr: vec![0],
        indices: Vec::new(),
        values: Vec::new(),
        y: Vec::new(),
        d: 0,
    };
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        if let Some(rec) = parse_record(&line, line_no)? {
            for (idx, v) in rec.entries {
                out.indices.push(idx - 1);
                out.values.push(v);
                out.d = out.d.max(idx);
            }
            out.indptr.push(out.indices.len());
            out.y.push(rec.label);
        }
    }
    Ok(out)
}

/// Writes a dataset in LIBSVM format; values use the shortest round-trip representation.
pub fn write_libsvm<W: Write>(ds: &Dataset, mut w: W) -> Result<()> {
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ds.n()];
    for j in 0..ds.d() {
        for (i, v) in ds.column(j) {
            if v != 0.0 {
                rows[i].push((j, v));
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        write!(w, "{:?}", ds.y()[i])?;
        for (j, v) in row {
            write!(w, " {}:{:?}", j + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRegistryEntry {
    pub name: String,
    pub n: usize,
    pub d: usize,
    pub bounds_kind: BoundsKind,
    /// File path, absolute or relative to the data directory.
    pub source: String,
    pub standardize: bool,
}

impl DatasetRegistryEntry {
    fn builtin(name: &str, n: usize, d: usize, kind: BoundsKind, source: &str) -> Self {
        DatasetRegistryEntry {
            name: name.into(),
            n,
            d,
            bounds_kind: kind,
            source: source.into(),
            standardize: true,
        }
    }

    pub fn resolve_source(&self, data_dir: Option<&Path>) -> PathBuf {
        let p = PathBuf::from(&self.source);
        if p.is_absolute() {
            return p;
        }
        match data_dir {
            Some(dir) => dir.join(p),
            None => match std::env::var_os(DATA_DIR_ENV) {
                Some(dir) => PathBuf::from(dir).join(p),
                None => p,
            },
        }
    }
}

/// The five real-world benchmarks with their expected shapes.
pub fn registry() -> Vec<DatasetRegistryEntry> {
    use BoundsKind::*;
    vec![
        DatasetRegistryEntry::builtin("breast_cancer", 683, 10, Real, "breast-cancer_scale"),
        DatasetRegistryEntry::builtin("diabetes", 768, 8, Real, "diabetes_scale"),
        DatasetRegistryEntry::builtin("leukemia", 72, 7129, Real, "leu"),
        DatasetRegistryEntry::builtin("dna", 2000, 180, Real, "dna.scale"),
        DatasetRegistryEntry::builtin("rcv1", 20242, 19959, Rcv1Like, "rcv1_train.binary"),
    ]
}

pub fn registry_entry(name: &str) -> Result<DatasetRegistryEntry> {
    let key = name.to_ascii_lowercase();
    registry()
        .into_iter()
        .find(|e| e.name == key)
        .ok_or_else(|| Error::Unknown {
            kind: "dataset",
            name: name.into(),
        })
}

/// Reads, validates and (optionally) standardizes a registered dataset.
pub fn load_real_dataset(entry: &DatasetRegistryEntry, data_dir: Option<&Path>) -> Result<Dataset> {
    let path = entry.resolve_source(data_dir);
    let file = std::fs::File::open(&path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let raw = parse_libsvm(BufReader::new(file))?;
    if raw.n() != entry.n || raw.d > entry.d {
        return Err(Error::Shape {
            name: entry.name.clone(),
            exp_n: entry.n,
            exp_d: entry.d,
            n: raw.n(),
            d: raw.d,
        });
    }
    let mut ds = raw.into_dataset(&entry.name, entry.d)?;
    if entry.d <= DENSE_MAX_FEATURES {
        ds = ds.to_dense();
    }
    if entry.standardize {
        ds = standardize(&ds)?;
    }
    Ok(ds)
}

/// Scales every column to unit variance. Dense columns are also centered;
/// sparse columns are only scaled so they stay sparse. Constant columns are
/// centered and left unscaled.
pub fn standardize(ds: &Dataset) -> Result<Dataset> {
    let n = ds.n();
    let nf = n as f64;
    if ds.is_sparse() {
        let d = ds.d();
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for j in 0..d {
            let col: Vec<(usize, f64)> = ds.column(j).collect();
            let mean = col.iter().map(|(_, v)| v).sum::<f64>() / nf;
            let var = col.iter().map(|(_, v)| v * v).sum::<f64>() / nf - mean * mean;
            let sd = var.max(0.0).sqrt();
            let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
            for (r, v) in col {
                indices.push(r);
                values.push(v * scale);
            }
            indptr.push(indices.len());
        }
        return Dataset::from_csc(ds.name(), n, d, indptr, indices, values, ds.y().to_vec());
    }
    let mut data = Vec::with_capacity(n * ds.d());
    for j in 0..ds.d() {
        let col: Vec<f64> = ds.column(j).map(|(_, v)| v).collect();
        let mean = col.iter().sum::<f64>() / nf;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
        let sd = var.sqrt();
        let scale = if sd > 1e-12 { 1.0 / sd } else { 1.0 };
        data.extend(col.iter().map(|v| (v - mean) * scale));
    }
    Dataset::from_dense_columns(ds.name(), n, ds.d(), data, ds.y().to_vec())
}
