#![allow(dead_code)]

use std::alloc::{GlobalAlloc, Layout, System};
use std::io::Read;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use wlasso_hpo::benchgen::BoundsKind;
use wlasso_hpo::ingest::DatasetRegistryEntry;
use wlasso_hpo::lasso::Dataset;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn entry(name: &str, n: usize, d: usize, kind: BoundsKind) -> DatasetRegistryEntry {
    DatasetRegistryEntry {
        name: name.to_string(),
        n,
        d,
        bounds_kind: kind,
        source: fixture(&format!("{name}.svm")).to_string_lossy().into_owned(),
        standardize: true,
    }
}

/// Three small real-format datasets: dense clinical, wide microarray and
/// sparse text.
pub fn real_fixtures() -> Vec<DatasetRegistryEntry> {
    vec![
        entry("clinic", 40, 6, BoundsKind::Real),
        entry("microarray", 12, 40, BoundsKind::Real),
        entry("newswire", 30, 600, BoundsKind::Rcv1Like),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let x = gaussian(rng, n * d);
    let y = gaussian(rng, n);
    Dataset::from_dense_columns("random", n, d, x, y).unwrap()
}

/// Design with `XᵀX = n·I`, built from the Q factor of a Gaussian matrix.
pub fn orthogonal_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let g = DMatrix::from_vec(n, d, gaussian(rng, n * d));
    let q = g.qr().q();
    let scale = (n as f64).sqrt();
    let data: Vec<f64> = q.iter().map(|v| v * scale).collect();
    let y: Vec<f64> = gaussian(rng, n).iter().map(|v| 3.0 * v).collect();
    Dataset::from_dense_columns("orthogonal", n, d, data, y).unwrap()
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..=hi)).collect()
}

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

/// Runs `f` and reports the peak heap growth it caused. Allocations from
/// other threads are counted too.
pub fn peak_heap<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let before = CURRENT.load(Ordering::Relaxed);
    PEAK.store(before, Ordering::Relaxed);
    let out = f();
    (out, PEAK.load(Ordering::Relaxed).saturating_sub(before))
}

/// Bytes per line produced by [`LazyRows`], give or take the row number.
pub const LAZY_LINE_BYTES: usize = 190;

/// Produces LIBSVM text on demand so the full file never exists in memory.
/// Each line carries two features and a long trailing comment.
pub struct LazyRows {
    rows: usize,
    next: usize,
    buf: Vec<u8>,
    pos: usize,
}

impl LazyRows {
    pub fn new(rows: usize) -> Self {
        LazyRows {
            rows,
            next: 0,
            buf: Vec::new(),
            pos: 0,
        }
    }
}

impl Read for LazyRows {
    fn read(&mut self, out: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.buf.len() {
            if self.next == self.rows {
                return Ok(0);
            }
            let i = self.next;
            self.next += 1;
            self.buf.clear();
            let pad = "x".repeat(150);
            let line = format!("{} {}:{} {}:0.5 # row {i} {pad}\n", i % 2, i % 50 + 1, i % 7 + 1, 60 + i % 40);
            self.buf.extend_from_slice(line.as_bytes());
            self.pos = 0;
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}
