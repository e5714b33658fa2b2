//! Command-line front end: classification of ψ, theorem bounds with sandwich
//! verification, order tables, extremal functions, best orthogonal
//! approximation and the reproducible verification suite.
//!
//! Every subcommand prints JSON (or CSV for tables) on stdout. The exit code
//! is 0 iff every verdict produced is `Pass`; 1 for a non-passing verdict and
//! 2 for invalid input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use psi_approx::approx::{best_orth_approx, Metric, Strategy};
use psi_approx::bounds::{
    order_table, parse_n_list, run_suite, sandwich_check, theorem_bounds, Corollary,
    SandwichConfig, TableConfig, Theorem,
};
use psi_approx::extremal::{extremal_fm, extremal_fn_star, extremal_fp, Truncation};
use psi_approx::psi::{classify, PsiFunction, SearchGrid, WeightedPsi};
use psi_approx::trig::{GridSpec, TrigPoly};
use psi_approx::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "psi-approx",
    version,
    about = "Best orthogonal trigonometric approximation of (ψ,β)-differentiable functions"
)]
struct Cli {
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Minimum number of equispaced sample points (raised to the oversampling rule).
    #[arg(long = "grid-n", global = true, default_value_t = GridSpec::default().points)]
    grid_n: usize,
    /// Golden-section refinement iterations for sup-norm candidates.
    #[arg(long = "refine-depth", global = true, default_value_t = GridSpec::default().refinement_depth)]
    refine_depth: usize,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec::new(self.grid_n, self.refine_depth)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operations on a single ψ.
    Psi {
        #[command(subcommand)]
        action: PsiCommand,
    },
    /// Theorem bounds for a class, verified against its extremal function.
    Bounds(BoundsArgs),
    /// Run a named verification suite and write its JSON report.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Order-equivalence table over a range of n.
    Table(TableArgs),
    /// Construct an extremal function.
    Extremal(ExtremalArgs),
    /// Best orthogonal approximation of a polynomial given as JSON.
    Approx(ApproxArgs),
}

#[derive(Debug, Subcommand)]
enum PsiCommand {
    /// Class membership (𝔐₀, 𝔐_C, …) from the α-characteristic.
    Classify {
        /// `power:r`, `log-power:p,γ,K`, `loglog-power:p,γ,δ,K1,K2`, the
        /// `-min` shorthands, or a JSON object.
        #[arg(long)]
        psi: String,
        /// Classify `ψ(t)·t^{1/q}` instead of ψ.
        #[arg(long)]
        q: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// T1 … T5.
    #[arg(long)]
    theorem: Theorem,
    #[arg(long)]
    psi: String,
    /// Class exponent (T1).
    #[arg(long)]
    p: Option<f64>,
    /// Metric exponent (T2).
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Largest dual-functional parameter tried.
    #[arg(long, default_value_t = SandwichConfig::default().l)]
    l: u64,
    /// Only evaluate the closed-form bounds.
    #[arg(long)]
    analytic_only: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long)]
    corollary: Corollary,
    /// `lo..hi` (powers of two) or a comma-separated list.
    #[arg(long)]
    n: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    /// Defaults to a representative member of the corollary's family.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = TableConfig::default().ratio_band)]
    ratio_band: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExtremalKind {
    Fp,
    Fm,
    FnStar,
}

#[derive(Debug, Args)]
struct ExtremalArgs {
    #[arg(long, value_enum)]
    kind: ExtremalKind,
    #[arg(long)]
    psi: String,
    /// Class exponent (fp).
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Order n (fp, fn-star) or m (fm).
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Number of frequencies kept for fp (default: automatic).
    #[arg(long)]
    truncate: Option<u64>,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    /// `{"coeffs": [[k, re, im], …]}` inline, or `@path` to a JSON file.
    #[arg(long)]
    poly: String,
    #[arg(long)]
    m: usize,
    /// Metric exponent `s >= 1` or `inf`.
    #[arg(long = "metric-s", default_value = "inf")]
    metric_s: Metric,
    #[arg(long, default_value = "exhaustive")]
    strategy: Strategy,
}

fn parse_psi(text: &str) -> Result<PsiFunction> {
    let text = text.trim();
    if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("ψ JSON: {e}")))
    } else {
        text.parse()
    }
}

fn default_table_psi(c: Corollary) -> Result<PsiFunction> {
    match c {
        Corollary::C1a => PsiFunction::power(0.75),
        Corollary::C1b | Corollary::C2 => PsiFunction::log_power_min_shift(2.0, 1.0),
        Corollary::C3 => PsiFunction::loglog_power_min_shift(2.0, 0.5, 1.0),
        Corollary::C4 => PsiFunction::power(2.0),
        Corollary::C5 | Corollary::T5 => PsiFunction::log_power(1.0, 2.0, 1.0),
        Corollary::C6 => PsiFunction::loglog_power(1.0, 1.0, 2.0, 1.0, 2.0),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// Runs one subcommand and reports whether all its verdicts passed.
fn run(cli: Cli) -> Result<bool> {
    let grid = cli.grid.spec();
    match cli.command {
        Command::Psi {
            action: PsiCommand::Classify { psi, q },
        } => {
            let psi = parse_psi(&psi)?;
            let cfg = SearchGrid::default();
            let result = match q {
                Some(q) => classify(&WeightedPsi::new(psi, q)?, &cfg),
                None => classify(&psi, &cfg),
            };
            print_json(&result)?;
            Ok(true)
        }
        Command::Bounds(args) => {
            let psi = parse_psi(&args.psi)?;
            let p_or_s = match args.theorem.resolve(args.beta) {
                Theorem::T1 => args.p.ok_or_else(|| Error::Parse("T1 needs --p".into()))?,
                Theorem::T2 => args.s.ok_or_else(|| Error::Parse("T2 needs --s".into()))?,
                _ => 1.0,
            };
            if args.analytic_only {
                let b = theorem_bounds(args.theorem, &psi, args.beta, p_or_s, args.n)?;
                print_json(&b)?;
                return Ok(true);
            }
            let cfg = SandwichConfig {
                l: args.l,
                grid,
                ..SandwichConfig::default()
            };
            let report = sandwich_check(args.theorem, &psi, args.beta, p_or_s, args.n, &cfg);
            print_json(&report)?;
            Ok(report.verdict.is_pass())
        }
        Command::Verify { suite, out } => {
            let (report, criteria) = run_suite(&suite)?;
            for c in &criteria {
                eprintln!("{}", c.line());
            }
            let text =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
            match out {
                Some(path) => fs::write(&path, text + "\n")
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
                None => println!("{text}"),
            }
            Ok(report.all_pass)
        }
        Command::Table(args) => {
            let psi = match &args.psi {
                Some(text) => parse_psi(text)?,
                None => default_table_psi(args.corollary)?,
            };
            let n_list = parse_n_list(&args.n)?;
            let cfg = TableConfig {
                p: args.p,
                beta: args.beta,
                ratio_band: args.ratio_band,
            };
            let table = order_table(args.corollary, &psi, &n_list, &cfg)?;
            match args.format {
                TableFormat::Csv => print!("{}", table.to_csv()),
                TableFormat::Json => print_json(&table)?,
            }
            Ok(table.verdict.is_pass())
        }
        Command::Extremal(args) => {
            let psi = parse_psi(&args.psi)?;
            let poly = match args.kind {
                ExtremalKind::Fp => {
                    let truncation = args
                        .truncate
                        .map_or(Truncation::default(), Truncation::Fixed);
                    extremal_fp(&psi, args.p, args.n, truncation)?.poly
                }
                ExtremalKind::Fm => extremal_fm(&psi, args.beta, args.n)?,
                ExtremalKind::FnStar => extremal_fn_star(&psi, args.n)?,
            };
            print_json(&poly)?;
            Ok(true)
        }
        Command::Approx(args) => {
            let text = match args.poly.strip_prefix('@') {
                Some(path) => fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?,
                None => args.poly,
            };
            let f: TrigPoly = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
            let result = best_orth_approx(&f, args.m, args.metric_s, args.strategy, &grid)?;
            print_json(&result)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
