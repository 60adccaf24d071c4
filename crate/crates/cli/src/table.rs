//! The classification grid over `(family, n, p)`.

use normtori::classify::{classify_norm_one_family, Rationality, RationalityVerdict};
use normtori::Family;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{progress, to_csv, CliResult, Format, RunConfig};

/// One grid cell. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub family: Family,
    pub n: usize,
    pub p: u64,
    /// `p`-retract rationality of the norm one torus.
    pub rational: bool,
    pub closed_form: bool,
    /// Decided by a rule rather than filled in from the closed form.
    pub engine: bool,
    pub cites: Option<String>,
    /// Criterion tag of the certificate behind a negative verdict.
    pub certificate: Option<String>,
}

/// Smallest `n` of the family that gives a non-Galois degree `n` extension.
pub fn first_n(family: Family) -> usize {
    match family {
        Family::Symmetric => 2,
        Family::Alternating => 4,
    }
}

/// Every `(family, n, p)` of the grid, in output order.
pub fn grid(config: &RunConfig) -> Vec<(Family, usize, u64)> {
    let mut out = Vec::new();
    for family in [Family::Symmetric, Family::Alternating] {
        for n in first_n(family)..=config.max_n {
            for &p in &config.primes {
                out.push((family, n, p));
            }
        }
    }
    out
}

pub fn cell_of(v: &RationalityVerdict, family: Family, n: usize, p: u64) -> Cell {
    let trace = v.trace.first();
    Cell {
        family,
        n,
        p,
        rational: v.verdict == Rationality::PRetractRational,
        closed_form: v.closed_form.unwrap_or(false),
        engine: v.engine_decided(),
        cites: trace.and_then(|t| t.cites.clone()),
        certificate: trace
            .and_then(|t| t.certificate.as_ref())
            .and_then(|c| c["criterion"].as_str())
            .map(str::to_string),
    }
}

/// Classifies every grid cell in parallel; the result is in grid order.
pub fn compute(config: &RunConfig) -> CliResult<Vec<Cell>> {
    let cells = grid(config);
    progress(format!("classifying {} cells", cells.len()));
    config.install(|| {
        cells
            .par_iter()
            .map(|&(family, n, p)| {
                let v = classify_norm_one_family(family, n, p)?;
                Ok(cell_of(&v, family, n, p))
            })
            .collect::<CliResult<Vec<Cell>>>()
    })?
}

pub fn render(cells: &[Cell], config: &RunConfig) -> CliResult<String> {
    match config.format {
        Format::Json => Ok(serde_json::to_string_pretty(cells)? + "\n"),
        Format::Csv => to_csv(cells),
        Format::Markdown => Ok(markdown(cells, &config.primes)),
    }
}

fn markdown(cells: &[Cell], primes: &[u64]) -> String {
    let mut out = String::from("| torus |");
    for p in primes {
        out += &format!(" p={p} |");
    }
    out += "\n|---|";
    out += &"---|".repeat(primes.len());
    out.push('\n');
    for row in cells.chunk_by(|a, b| (a.family, a.n) == (b.family, b.n)) {
        out += &format!("| {}_{}/{}_{} |", row[0].family, row[0].n, row[0].family, row[0].n - 1);
        for c in row {
            let mark = if c.rational { "yes" } else { "no" };
            out += &format!(" {mark} |");
        }
        out.push('\n');
    }
    out
}

/// Parses CSV produced by [`render`].
pub fn parse_csv(text: &str) -> CliResult<Vec<Cell>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<Cell>, _>>()?)
}
