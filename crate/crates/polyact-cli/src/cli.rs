//! Argument surface and dispatch for the polyact binary.
//!
//! Exit codes: 0 all checked laws hold, 1 a law was violated (the report
//! carries the witness), 2 the scenario or request was malformed.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{self, Family};
use crate::report::Report;
use crate::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "polyact",
    version,
    about = "Exact checker for local actions, polynomial functions and convolution algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sweep the identity, compatibility and composition laws of a scenario.
    VerifyAxioms { scenario: PathBuf },
    /// Compute the set of translators acting on a named function.
    Vf { scenario: PathBuf },
    /// Search the scenario's subgroup chain for a polynomial certificate.
    PolyCheck { scenario: PathBuf },
    /// Split F(x,p) = f(x.p) g(p) into finitely many pure tensors.
    Decompose { scenario: PathBuf },
    /// Verify irreducible families and project onto isotypic components.
    Isotypic { scenario: PathBuf },
    /// Convolve two named functions and check the star identities.
    Convolve { scenario: PathBuf },
    /// Build two-sided local convolution units for a polynomial function.
    LocalUnit { scenario: PathBuf },
    /// Run a seeded generated corpus of law checks.
    Suite {
        /// Instance family to generate.
        #[arg(long, value_enum, default_value_t = Family::Finite)]
        family: Family,
        /// How many instances.
        #[arg(long, default_value_t = 25)]
        count: u32,
        /// Generator seed; fixing it fixes the corpus and the report bytes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| e.to_string())
}

fn dispatch(cli: &Cli) -> Result<Report, String> {
    let scenario_of = |p: &PathBuf| load(p);
    match &cli.command {
        Command::VerifyAxioms { scenario } => {
            commands::verify_axioms(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::Vf { scenario } => {
            commands::vf(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::PolyCheck { scenario } => {
            commands::poly_check(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::Decompose { scenario } => {
            commands::decompose(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::Isotypic { scenario } => {
            commands::isotypic(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::Convolve { scenario } => {
            commands::convolve_cmd(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::LocalUnit { scenario } => {
            commands::local_unit_cmd(&scenario_of(scenario)?).map_err(|e| e.to_string())
        }
        Command::Suite {
            family,
            count,
            seed,
        } => commands::suite(*family, *count, *seed).map_err(|e| e.to_string()),
    }
}

fn emit(cli: &Cli, rendered: String) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

/// Parses argv, runs the requested command and streams the report to the
/// chosen sink. The returned code is the binary's exit status.
pub fn run_command<I>(argv: I) -> ExitCode
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version land on stdout with status 0; real argument
            // errors land on stderr with status 2, matching clap's default.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let rendered = match cli.format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            if let Err(e) = emit(&cli, rendered) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.violated() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
