use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use isoshell_bench::cases::{case_catalogue, CaseId};
use isoshell_bench::config::{StrategyName, StudyConfig};
use isoshell_bench::report::summary;
use isoshell_bench::study::run_study;
use isoshell_bench::verify;
use isoshell_coupling::Beta;

/// Benchmarks for multi-patch Kirchhoff-Love shells with weak interface coupling.
#[derive(Parser)]
#[command(name = "bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study and write CSV reports.
    Run(RunArgs),
    /// List the benchmark catalogue.
    List,
    /// Run the property suites.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file; keys set there override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "model")]
    case: Option<CaseId>,
    /// JSON model file to study instead of a catalogue case.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    strategy: Option<StrategyName>,
    #[arg(long)]
    beta: Option<Beta>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    thickness: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a VTK dump of the finest level with this many points per element edge.
    #[arg(long)]
    vtk: Option<usize>,
    /// Also write gnuplot-ready columns.
    #[arg(long)]
    gnuplot: bool,
    /// Print nothing but errors.
    #[arg(long, short)]
    quiet: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let flags = StudyConfig {
        case: args.case,
        model: args.model,
        strategy: args.strategy,
        beta: args.beta,
        degree: args.degree,
        levels: args.levels,
        thickness: args.thickness,
        vtk: args.vtk,
        gnuplot: args.gnuplot.then_some(true),
        out: args.out,
        ..Default::default()
    };
    let cfg = match &args.config {
        Some(path) => flags.overridden_by(StudyConfig::load(path)?),
        None => flags,
    };
    let study = cfg.resolve()?;
    let start = Instant::now();
    let (reports, written) = run_study(&study).with_context(|| format!("study of {}", study.target.label()))?;
    if !args.quiet {
        print!("{}", summary(&reports));
        for path in &written {
            println!("wrote {}", path.display());
        }
        println!("total {:.1} s", start.elapsed().as_secs_f64());
    }
    Ok(())
}

fn list() {
    for c in case_catalogue() {
        let t = if c.thicknesses.len() > 1 {
            c.thicknesses.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
        } else {
            c.thickness.to_string()
        };
        let kind = if c.manufactured { "manufactured" } else { "reference" };
        println!(
            "{:<13} E = {:<9e} nu = {:<4} t = {:<16} {:<12} {}",
            c.id.name(),
            c.young,
            c.poisson,
            t,
            kind,
            c.description
        );
    }
}

fn verify(seed: u64) -> Result<bool> {
    let mut all = true;
    for (suite, checks) in verify::run_all(seed)? {
        println!("[{suite}]");
        for c in checks {
            all &= c.passed();
            println!("  {c}");
        }
    }
    println!("{}", if all { "all checks passed" } else { "some checks FAILED" });
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::List => {
            list();
            Ok(true)
        }
        Command::Verify { seed } => verify(seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
