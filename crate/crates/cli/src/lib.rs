//! Batch front end: classification tables, single-case traces, lattice dumps and
//! the verification suite. `main.rs` only parses arguments and maps errors to exit
//! codes.

pub mod lattice_io;
pub mod table;
pub mod verify;

use std::fmt;
use std::str::FromStr;

use normtori::group::{is_prime, SUBGROUP_CLASS_BOUND};
use thiserror::Error;

/// Environment variable overriding the subgroup enumeration cutoff.
pub const CUTOFF_ENV: &str = "NORMTORI_CUTOFF";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] normtori::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 success, 1 verification failure, 2 usage or parse error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) | CliError::Core(normtori::Error::Internal(_)) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

/// Comma-separated primes; the empty string is the empty list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeList(pub Vec<u64>);

impl Default for PrimeList {
    fn default() -> Self {
        PrimeList(vec![2, 3, 5, 7, 11, 13])
    }
}

impl FromStr for PrimeList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let p: u64 = part.parse().map_err(|_| format!("{part:?} is not an integer"))?;
            if !is_prime(p) {
                return Err(format!("{p} is not prime"));
            }
            out.push(p);
        }
        out.sort_unstable();
        out.dedup();
        Ok(PrimeList(out))
    }
}

impl fmt::Display for PrimeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub max_n: usize,
    pub primes: Vec<u64>,
    pub format: Format,
    /// Largest group order whose subgroup classes are enumerated in sweeps.
    pub cutoff: u128,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_n: 12,
            primes: PrimeList::default().0,
            format: Format::Json,
            cutoff: SUBGROUP_CLASS_BOUND,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.cutoff == 0 {
            return Err(CliError::Usage("the cutoff must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        if self.max_n > normtori::perm::MAX_DEGREE {
            return Err(CliError::Usage(format!("--max-n is at most {}", normtori::perm::MAX_DEGREE)));
        }
        Ok(())
    }

    /// Runs `f` inside a pool of the configured size.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> CliResult<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            builder = builder.num_threads(j);
        }
        let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

pub(crate) fn progress(msg: impl AsRef<str>) {
    eprintln!("{}", msg.as_ref());
}

/// Writes `rows` as CSV with a header.
pub(crate) fn to_csv<T: serde::Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
