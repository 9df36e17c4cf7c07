use std::process::ExitCode;

use clap::Parser;
use csf_cli::commands::{dispatch, EXIT_FAILURE};
use csf_cli::config::{Cli, ExperimentConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match ExperimentConfig::from_cli(&cli).and_then(|cfg| dispatch(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    };
    ExitCode::from(code as u8)
}
