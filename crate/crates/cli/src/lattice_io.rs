//! Lattice files: `resolve` and `cohomology`.

use std::path::Path;

use normtori::cohomology::{sweep_with, tate};
use normtori::lattice::LatticeJson;
use normtori::resolution::{flasque_resolution_with, CoverStrategy, ResolutionJson};
use normtori::{GLattice, Permutation, Subgroup};
use serde::Serialize;

use crate::{to_csv, CliError, CliResult, Format, RunConfig};

pub fn load_lattice(path: &Path) -> CliResult<GLattice> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse_lattice(&text)
}

pub fn parse_lattice(text: &str) -> CliResult<GLattice> {
    let doc: LatticeJson = serde_json::from_str(text)?;
    Ok(GLattice::from_json(&doc)?)
}

/// The flasque resolution of the lattice, checked for exactness.
pub fn resolve(m: &GLattice, strategy: CoverStrategy) -> CliResult<ResolutionJson> {
    let res = flasque_resolution_with(m.group(), m, strategy)?;
    res.check_exact()?;
    Ok(res.to_json())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyRow {
    pub subgroup: String,
    pub order: u128,
    pub degree: i8,
    /// Elementary divisors, `;`-separated; empty for the trivial group.
    pub invariants: String,
}

fn row(k: &Subgroup, degree: i8, t: &normtori::cohomology::TateGroup) -> CohomologyRow {
    let gens: Vec<String> = k.generators().iter().map(|g| g.to_cycle_string()).collect();
    let inv: Vec<String> = t.invariants.iter().map(|d| d.to_string()).collect();
    CohomologyRow { subgroup: format!("<{}>", gens.join(", ")), order: k.order(), degree, invariants: inv.join(";") }
}

/// `Ĥ^d(K, M)` for the subgroup generated by `generators`, or for every subgroup
/// class when none are given.
pub fn cohomology(m: &GLattice, generators: &[String], degrees: &[i8], config: &RunConfig) -> CliResult<Vec<CohomologyRow>> {
    let g = m.group();
    let mut rows = Vec::new();
    if generators.is_empty() {
        for &d in degrees {
            for (k, t) in sweep_with(g, m, d, config.cutoff)? {
                rows.push(row(&k, d, &t));
            }
        }
        return Ok(rows);
    }
    let gens = generators
        .iter()
        .map(|s| Permutation::parse_cycles(g.degree(), s))
        .collect::<normtori::Result<Vec<_>>>()?;
    let k = g.subgroup(gens, None)?;
    for &d in degrees {
        rows.push(row(&k, d, &tate(d, &k, m)?));
    }
    Ok(rows)
}

pub fn render_rows(rows: &[CohomologyRow], format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Csv => to_csv(rows),
        Format::Markdown => {
            let mut out = String::from("| subgroup | order | degree | group |\n|---|---|---|---|\n");
            for r in rows {
                let group = if r.invariants.is_empty() {
                    "0".to_string()
                } else {
                    r.invariants.split(';').map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
                };
                out += &format!("| {} | {} | {} | {group} |\n", r.subgroup, r.order, r.degree);
            }
            Ok(out)
        }
    }
}
