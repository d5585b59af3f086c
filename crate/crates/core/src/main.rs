use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use minvol::cli::{run, Cli};

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    if !outcome.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", outcome.stdout.trim_end());
    }
    if !outcome.stderr.is_empty() {
        eprintln!("{}", outcome.stderr);
    }
    ExitCode::from(outcome.code as u8)
}
