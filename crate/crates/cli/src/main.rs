//! `ncbounds`: classical, quantum and exclusivity bounds for
//! noncontextuality inequalities, and the bunching simulations.
//!
//! Exit status: 0 when the analysis completed (whatever the verdict), 2 for
//! invalid input, 3 when a solver hit a capacity limit or failed to converge.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ncbounds::analysis::{
    exclusivity_summary, render_exclusivity, render_simulation, render_text, simulate, AnalysisError,
};
use ncbounds::{analyze, parse_scenario, run_builtin, AnalysisOptions, Builtin, ScenarioDocument, SolverConfig};

#[derive(Parser)]
#[command(
    name = "ncbounds",
    version,
    about = "Bounds for noncontextuality inequalities via exclusivity graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse a scenario file: all bounds, requirements and verdicts.
    Analyze { file: PathBuf },
    /// Analyse a built-in scenario (kcbs, specker, bunching-kcbs, bunching-specker).
    Builtin { name: String },
    /// Print only the exclusivity graph of a scenario file.
    Exclusivity { file: PathBuf },
    /// Run only the optical simulation of a built-in bunching scenario.
    Simulate { name: String },
}

#[derive(Args)]
struct Flags {
    /// Certified gap required of the Lovász-number solve.
    #[arg(long, global = true, default_value_t = SolverConfig::default().tolerance, value_parser = positive)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = SolverConfig::default().max_iterations)]
    max_iterations: usize,
    #[arg(long, global = true, default_value_t = SolverConfig::default().seed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also compute the two-copy exclusivity bound through the strong product.
    #[arg(long, global = true)]
    two_copy: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        if e.is_solver_failure() {
            Failure::Solver(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let flags = &cli.flags;
    let opts = AnalysisOptions {
        solver: SolverConfig {
            tolerance: flags.tolerance,
            max_iterations: flags.max_iterations,
            seed: flags.seed,
            ..SolverConfig::default()
        },
        two_copy: flags.two_copy,
        ..AnalysisOptions::default()
    };
    let machine = flags.format == Format::Machine;
    match &cli.command {
        Command::Analyze { file } => {
            let report = analyze(&load(file)?, &opts)?;
            Ok(if machine {
                report.to_machine()
            } else {
                render_text(&report)
            })
        }
        Command::Builtin { name } => {
            let report = run_builtin(name.parse::<Builtin>()?, &opts)?;
            Ok(if machine {
                report.to_machine()
            } else {
                render_text(&report)
            })
        }
        Command::Exclusivity { file } => {
            let summary = exclusivity_summary(&load(file)?)?;
            Ok(if machine {
                to_json(&summary)
            } else {
                render_exclusivity(&summary)
            })
        }
        Command::Simulate { name } => {
            let builtin = name.parse::<Builtin>()?;
            let sim = simulate(builtin)?
                .ok_or_else(|| Failure::Input(format!("{name} has no optical experiment to simulate")))?;
            Ok(if machine {
                to_json(&sim)
            } else {
                render_simulation(&sim)
            })
        }
    }
}

fn load(path: &Path) -> Result<ScenarioDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let doc = parse_scenario(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for w in &doc.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(doc)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialise") + "\n"
}
