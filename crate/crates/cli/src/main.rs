use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normtori_cli::lattice_io::{cohomology, load_lattice, render_rows, resolve};
use normtori_cli::verify::{self, failing_references, Status, VerifyOptions};
use normtori_cli::{table, CliError, CliResult, Format, PrimeList, RunConfig, CUTOFF_ENV};
use normtori::classify::{classify_norm_one_family, classify_norm_one_family_all, PrimeSpec, RationalityVerdict};
use normtori::group::SUBGROUP_CLASS_BOUND;
use normtori::resolution::CoverStrategy;
use normtori::Family;

#[derive(Parser, Debug)]
#[command(name = "normtori", version, about = "p-retract rationality of norm one tori, with proof traces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Largest degree n in grids and the verification suite.
    #[arg(long, default_value_t = 12, global = true)]
    max_n: usize,
    /// Comma-separated primes; an empty string gives no primes.
    #[arg(long, default_value_t = PrimeList::default(), global = true)]
    primes: PrimeList,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest group order whose subgroup classes are enumerated.
    #[arg(long, env = CUTOFF_ENV, default_value_t = SUBGROUP_CLASS_BOUND, global = true)]
    cutoff: u128,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the norm one torus of S_n/S_{n-1} or A_n/A_{n-1} at p, or at all primes.
    Classify {
        family: Family,
        n: usize,
        /// A prime or "all".
        p: PrimeSpec,
    },
    /// The classification grid over family, n <= max-n and the configured primes.
    Table,
    /// Recompute every decomposition and certificate, plus flasqueness and splitting checks.
    VerifyPaper {
        /// Perturb the stated decomposition of the propositions whose label contains this text.
        #[arg(long, value_name = "LABEL")]
        inject_fault: Option<String>,
    },
    /// Flasque resolution of a lattice file, as JSON.
    Resolve {
        lattice: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
        strategy: Strategy,
    },
    /// Tate cohomology of a lattice file at a subgroup, or at every subgroup class.
    Cohomology {
        lattice: PathBuf,
        /// Generator of the subgroup in cycle notation; repeat for more.
        #[arg(long = "subgroup", value_name = "CYCLES")]
        subgroup: Vec<String>,
        /// Degrees among -1, 0, 1.
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',', default_values_t = [-1i8, 0, 1])]
        degree: Vec<i8>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    Greedy,
    Full,
}

fn config(g: &Global) -> CliResult<RunConfig> {
    let c = RunConfig { max_n: g.max_n, primes: g.primes.0.clone(), format: g.format, cutoff: g.cutoff, jobs: g.jobs };
    c.validate()?;
    Ok(c)
}

fn render_verdict(v: &RationalityVerdict, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v)? + "\n"),
        Format::Csv => {
            #[derive(serde::Serialize)]
            struct Row<'a> {
                p: u64,
                verdict: String,
                cites: Option<&'a str>,
            }
            let rows: Vec<Row> =
                v.trace.iter().map(|t| Row { p: t.p, verdict: t.verdict.to_string(), cites: t.cites.as_deref() }).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?).expect("UTF-8"))
        }
        Format::Markdown => {
            let mut out = format!("**{}** at p = {}\n\n", v.verdict, v.p);
            for note in &v.notes {
                out += &format!("> {note}\n");
            }
            for t in &v.trace {
                out += &format!("\n- p = {}: {}", t.p, t.verdict);
                if let Some(c) = &t.cites {
                    out += &format!(" ({c})");
                }
                out.push('\n');
                for r in &t.rules {
                    out += &format!("  - {} [{}]: {}\n", r.name, r.paper_ref, r.witness);
                }
            }
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = config(&cli.global)?;
    match cli.command {
        Command::Classify { family, n, p } => {
            let v = match p {
                PrimeSpec::Prime(p) => classify_norm_one_family(family, n, p)?,
                PrimeSpec::All => classify_norm_one_family_all(family, n)?,
            };
            print!("{}", render_verdict(&v, cfg.format)?);
        }
        Command::Table => {
            let cells = table::compute(&cfg)?;
            print!("{}", table::render(&cells, &cfg)?);
        }
        Command::VerifyPaper { inject_fault } => {
            let report = verify::run(&cfg, &VerifyOptions { inject_fault })?;
            print!("{}", verify::render(&report, cfg.format)?);
            eprintln!(
                "{} passed, {} failed, {} skipped",
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::Skip)
            );
            if !report.passed() {
                return Err(CliError::Verification(failing_references(&report).join(", ")));
            }
        }
        Command::Resolve { lattice, strategy } => {
            let m = load_lattice(&lattice)?;
            let strategy = match strategy {
                Strategy::Greedy => CoverStrategy::Greedy,
                Strategy::Full => CoverStrategy::FullBasis,
            };
            println!("{}", serde_json::to_string_pretty(&resolve(&m, strategy)?)?);
        }
        Command::Cohomology { lattice, subgroup, degree } => {
            let m = load_lattice(&lattice)?;
            let rows = cohomology(&m, &subgroup, &degree, &cfg)?;
            print!("{}", render_rows(&rows, cfg.format)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
