use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("degenerate problem: {0}")]
    Degenerate(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch for {name}: expected (n={exp_n}, d={exp_d}), found (n={n}, d={d})")]
    Shape {
        name: String,
        exp_n: usize,
        exp_d: usize,
        n: usize,
        d: usize,
    },
    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            got,
        })
    }
}
