mod args;
mod commands;
mod error;
mod output;
mod parse;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{expand_config, Cli};
use error::CliError;

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => return fail(&CliError::Usage(msg), None),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            _ => {
                return fail(&CliError::Usage(clap_message(&e)), None);
            }
        },
    };
    let name = cli.command.name();
    if let Err(e) = init_threads(cli.threads) {
        return fail(&e, Some(name));
    }
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{}", summary.line);
            if summary.warnings > 0 {
                eprintln!("warning: {} cells or points failed; see the error column", summary.warnings);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, Some(name)),
    }
}

/// Clap's message without the usage block, on one line.
fn clap_message(e: &clap::Error) -> String {
    e.render()
        .to_string()
        .lines()
        .take_while(|l| !l.starts_with("Usage:"))
        .map(|l| l.trim().trim_start_matches("error: "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Usage(format!(
            "thread count must be positive (--threads or {})",
            args::THREADS_ENV
        )));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::internal)
}

fn fail(e: &CliError, subcommand: Option<&str>) -> ExitCode {
    eprintln!("{}", e.record(subcommand));
    ExitCode::from(e.exit_code())
}
