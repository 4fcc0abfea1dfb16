//! polyact: exact verification and computation for local group actions,
//! polynomial functions, isotypic projections and convolution algebras.

use std::process::ExitCode;

fn main() -> ExitCode {
    polyact_cli::cli::run_command(std::env::args_os())
}
