//! The acceptance suite: one pass/fail line per criterion at the default
//! resolution, then the full table. Criteria listed in `KNOWN_UNATTAINABLE`
//! are evaluated and reported like the others but do not fail the target.

use std::process::ExitCode;

use csf_cli::verify::{format_table, run_all, VerifyConfig, KNOWN_UNATTAINABLE};

fn main() -> ExitCode {
    let reports = run_all(&VerifyConfig::default());
    for r in &reports {
        println!("{}", r.summary_line());
    }
    println!();
    print!("{}", format_table(&reports));

    let unexpected: Vec<u8> = reports
        .iter()
        .filter(|r| !r.passed() && !KNOWN_UNATTAINABLE.contains(&r.id))
        .map(|r| r.id)
        .collect();
    if reports.len() != 12 || !unexpected.is_empty() {
        eprintln!("acceptance: unexpected failures {unexpected:?}");
        return ExitCode::FAILURE;
    }
    println!("acceptance: ok (known unattainable: {KNOWN_UNATTAINABLE:?})");
    ExitCode::SUCCESS
}
