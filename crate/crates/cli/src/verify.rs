//! The verification suite: every §4 decomposition and certificate within the
//! configured bounds, the free restriction, flasqueness spot checks, splitting at
//! primes not dividing the index, and the classification grid.

use normtori::cohomology::sweep_with;
use normtori::invertibility::{certify, paper_instance, verify_splitting_prime_to_p, Criterion, PaperInstance};
use normtori::lattice::{free_restriction_decomposition, permutation_lattice};
use normtori::linalg::is_unimodular;
use normtori::resolution::rho;
use normtori::classify::family_pair;
use normtori::{Family, FiniteGroup, GLattice, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::table::{self, first_n};
use crate::{progress, to_csv, CliError, CliResult, Format, RunConfig};

/// Largest witness order whose restricted resolution is swept for flasqueness.
pub const FLASQUE_WITNESS_BOUND: u128 = 64;

/// Propositions that may stand behind a negative grid cell.
pub const NEGATIVE_PROPOSITIONS: [&str; 6] =
    ["Prop oddprimeS", "Prop evenS", "Prop oddprimeA", "Prop evenA1", "Prop evenA2", "Theorem mainS (n = 4"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub section: String,
    pub subject: String,
    pub reference: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(section: &str, subject: String, reference: &str, outcome: Result<String>) -> Self {
        let (status, detail) = match outcome {
            Ok(d) => (Status::Pass, d),
            Err(e) => (Status::Fail, e.to_string()),
        };
        Check { section: section.into(), subject, reference: reference.into(), status, detail }
    }

    fn skip(section: &str, subject: String, reference: &str, why: String) -> Self {
        Check { section: section.into(), subject, reference: reference.into(), status: Status::Skip, detail: why }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Perturb the stated decomposition of every instance whose proposition
    /// contains this label.
    pub inject_fault: Option<String>,
}

/// §4 instances for `n <= max_n` over the configured primes.
pub fn instances(config: &RunConfig) -> Vec<PaperInstance> {
    let mut out = Vec::new();
    for family in [Family::Symmetric, Family::Alternating] {
        for n in first_n(family)..=config.max_n {
            for &p in &config.primes {
                if let Ok(inst) = paper_instance(family, n, p) {
                    out.push(inst);
                }
            }
        }
    }
    out
}

fn perturb(inst: &mut PaperInstance) -> bool {
    match inst.stated.as_mut().and_then(|s| s.first_mut()) {
        Some(c) => {
            c.multiplicity += 1;
            true
        }
        None => false,
    }
}

fn subject(inst: &PaperInstance) -> String {
    format!("{}_{}, p = {}", inst.family, inst.n, inst.p)
}

fn decomposition_checks(insts: &[PaperInstance]) -> Vec<Check> {
    insts
        .par_iter()
        .map(|inst| {
            let outcome = certify(inst).map(|c| format!("{} orbit classes, criterion {}", c.decomposition.len(), c.criterion.tag()));
            Check::new("decomposition", subject(inst), &inst.proposition, outcome)
        })
        .collect()
}

fn free_restriction_check(inst: &PaperInstance) -> Check {
    let outcome = (|| {
        let (g, h) = family_pair(inst.family, inst.n)?;
        let fr = free_restriction_decomposition(&g, &h, &inst.witness)?;
        if fr.t != inst.n / 4 {
            return Err(normtori::Error::Internal(format!("{} free orbits, expected {}", fr.t, inst.n / 4)));
        }
        if !is_unimodular(&fr.basis_change) {
            return Err(normtori::Error::Internal("basis change is not unimodular".into()));
        }
        Ok(format!("free of rank {}, J = J_P + Z[P]^{}", fr.t, fr.t - 1))
    })();
    Check::new("free-restriction", subject(inst), &inst.proposition, outcome)
}

fn swept_trivial(g: &FiniteGroup, m: &GLattice, cutoff: u128) -> Result<bool> {
    Ok(sweep_with(g, m, -1, cutoff)?.iter().all(|(_, t)| t.is_trivial()))
}

/// `ρ(M)` is flasque and the permutation lattices involved have `Ĥ^{-1} = 0`.
fn flasque_check(g: &FiniteGroup, perm: &GLattice, cutoff: u128) -> Result<String> {
    let j = normtori::lattice::norm_one_of(perm)?;
    let f = rho(g, &j)?;
    if !swept_trivial(g, &f, cutoff)? {
        return Err(normtori::Error::Internal("ρ(J) has a non-trivial Ĥ^{-1}".into()));
    }
    if !swept_trivial(g, perm, cutoff)? {
        return Err(normtori::Error::Internal("permutation lattice has a non-trivial Ĥ^{-1}".into()));
    }
    Ok(format!("ρ(J) of rank {} is flasque; Z[X] has Ĥ^-1 = 0", f.rank()))
}

type Job = (String, String, Box<dyn Fn() -> Result<String> + Send + Sync>);

fn flasque_checks(config: &RunConfig, insts: &[PaperInstance]) -> Vec<Check> {
    let mut jobs: Vec<Job> = Vec::new();
    for n in 3..=config.max_n.min(5) {
        let cutoff = config.cutoff;
        jobs.push((
            format!("S_{n}"),
            "flasque resolution".into(),
            Box::new(move || {
                let (g, h) = family_pair(Family::Symmetric, n)?;
                flasque_check(&g, &permutation_lattice(&g, &h)?, cutoff)
            }),
        ));
    }
    let mut skipped = Vec::new();
    for inst in insts {
        let order = inst.witness.order();
        if order > FLASQUE_WITNESS_BOUND || order > config.cutoff {
            skipped.push(Check::skip(
                "flasque",
                subject(inst),
                &inst.proposition,
                format!("witness of order {order} exceeds the sweep bound"),
            ));
            continue;
        }
        let (family, n, w, cutoff) = (inst.family, inst.n, inst.witness.clone(), config.cutoff);
        jobs.push((
            format!("{} restricted to P of order {order}", subject(inst)),
            inst.proposition.clone(),
            Box::new(move || {
                let (g, h) = family_pair(family, n)?;
                flasque_check(&w, &permutation_lattice(&g, &h)?.restrict(&w)?, cutoff)
            }),
        ));
    }
    let mut out: Vec<Check> = jobs.par_iter().map(|(s, r, f)| Check::new("flasque", s.clone(), r, f())).collect();
    out.extend(skipped);
    out
}

fn splitting_checks(config: &RunConfig) -> Vec<Check> {
    table::grid(config)
        .into_par_iter()
        .filter(|&(_, n, p)| n as u64 % p != 0)
        .map(|(family, n, p)| {
            let outcome = family_pair(family, n).and_then(|(g, h)| verify_splitting_prime_to_p(&g, &h, p)).map(|proof| {
                format!("Sylow of order {} splits with denominator {}", proof.sylow_order, proof.denominator)
            });
            Check::new("splitting", format!("{family}_{n}, p = {p}"), "Prop 3.3", outcome)
        })
        .collect()
}

fn grid_checks(config: &RunConfig) -> CliResult<Vec<Check>> {
    let cells = table::compute(config)?;
    Ok(cells
        .into_iter()
        .map(|c| {
            let subject = format!("{}_{}, p = {}", c.family, c.n, c.p);
            let outcome = if c.rational != c.closed_form {
                Err(normtori::Error::Internal("verdict differs from the closed form".into()))
            } else if !c.engine {
                Err(normtori::Error::Internal("no rule decided the cell".into()))
            } else if !c.rational && !c.cites.as_deref().is_some_and(|s| NEGATIVE_PROPOSITIONS.iter().any(|p| s.starts_with(p))) {
                Err(normtori::Error::Internal(format!("negative cell cites {:?}", c.cites)))
            } else {
                Ok(if c.rational { "p-retract rational" } else { "not p-retract rational" }.to_string())
            };
            let reference = c.cites.clone().unwrap_or_else(|| "closed form".into());
            Check::new("classification", subject, &reference, outcome)
        })
        .collect())
}

pub fn run(config: &RunConfig, opts: &VerifyOptions) -> CliResult<Report> {
    config.validate()?;
    let mut insts = instances(config);
    if let Some(label) = &opts.inject_fault {
        let mut hit = false;
        for inst in insts.iter_mut().filter(|i| i.proposition.contains(label.as_str())) {
            hit |= perturb(inst);
        }
        if !hit {
            return Err(CliError::Usage(format!("no instance with a stated decomposition matches {label:?}")));
        }
        progress(format!("fault injection: perturbed the decomposition stated by {label}"));
    }
    let mut report = config.install(|| {
        let mut report = Report::default();
        progress(format!("decompositions: {} instances", insts.len()));
        report.checks.extend(decomposition_checks(&insts));
        let free: Vec<&PaperInstance> = insts.iter().filter(|i| i.criterion == Criterion::KleinFreeJp).collect();
        report.checks.extend(free.par_iter().map(|i| free_restriction_check(i)).collect::<Vec<_>>());
        progress("flasqueness sweeps");
        report.checks.extend(flasque_checks(config, &insts));
        progress("splitting at primes not dividing the index");
        report.checks.extend(splitting_checks(config));
        report
    })?;
    report.checks.extend(grid_checks(config)?);
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => to_csv(&report.checks),
        Format::Markdown => {
            let mut out = String::from("| section | subject | reference | status | detail |\n|---|---|---|---|---|\n");
            for c in &report.checks {
                let status = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "skip",
                };
                out += &format!("| {} | {} | {} | {status} | {} |\n", c.section, c.subject, c.reference, c.detail);
            }
            out += &format!(
                "\n{} passed, {} failed, {} skipped\n",
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::Skip)
            );
            Ok(out)
        }
    }
}

/// Names of the propositions with a failing check, sorted and deduplicated.
pub fn failing_references(report: &Report) -> Vec<String> {
    let mut refs: Vec<String> = report.failures().map(|c| c.reference.clone()).collect();
    refs.sort();
    refs.dedup();
    refs
}
