mod args;
mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use error::CliError;

/// Default report directory when `--output` is absent.
const OUTPUT_DIR_VAR: &str = "HOAA_OUTPUT_DIR";

fn execute(cli: &Cli) -> Result<(), CliError> {
    let report = commands::run(&cli.command, &cli.common)?;
    let bytes = report.render(cli.common.format)?;
    let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from);
    let dest = report::destination(cli.common.output.as_deref(), dir.as_deref(), &report.name, cli.common.format);
    report::emit(&bytes, dest.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
