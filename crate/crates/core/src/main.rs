use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use swanson_core::cli::{self, CliError, RunOptions};

/// Generalized Swanson Hamiltonian: metric, Hermitian equivalent and spectral checks.
#[derive(Debug, Parser)]
#[command(name = "swanson", version)]
struct Args {
    /// Line-based `section.key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the discretized operators as `row col value` triplets.
    #[arg(long)]
    dump_matrix: bool,
    /// Run the nonsymmetric solver regardless of grid size.
    #[arg(long)]
    oracle: bool,
    /// Suppress the summary on standard output.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let opts = RunOptions { out: args.out, dump_matrix: args.dump_matrix, oracle: args.oracle, quiet: args.quiet };
    ExitCode::from(cli::run_from_path(&args.config, &opts) as u8)
}
