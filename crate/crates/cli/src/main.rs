//! `sawlab` — batch experiments on self-avoiding walks in diluted lattices.
//!
//! Results go to stdout as CSV; `--output FILE` additionally writes a JSON
//! report carrying the resolved configuration, version, and timing. The
//! `--threads` flag only changes wall time, never results.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

mod commands;
mod config;
mod errors;
mod output;
mod selftest;

use commands::{Cli, CommandOutput};
use config::FileConfig;
use errors::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<(CommandOutput, Option<PathBuf>, Option<usize>, u64, Instant)> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = file.resolve_seed(cli.seed)?;
    let threads = file.resolve(cli.threads, "threads")?;
    let output_path = match &cli.output {
        Some(p) => Some(p.clone()),
        None => file.raw("output").map(PathBuf::from),
    };
    let started = Instant::now();
    let out =
        sawlab_core::exec::with_threads(threads, || commands::dispatch(&cli.command, &file, seed))?;
    Ok((out, output_path, threads, seed, started))
}

fn emit(
    mut out: CommandOutput,
    output_path: Option<PathBuf>,
    threads: Option<usize>,
    seed: u64,
    started: Instant,
) -> CliResult<()> {
    output::print_stdout(&out.stdout_text)?;
    if let Some(path) = output_path {
        if out.raw {
            std::fs::write(&path, out.stdout_text.as_bytes())?;
        } else {
            if let Value::Object(map) = &mut out.config_echo {
                map.insert("seed".into(), json!(seed));
                map.insert("threads".into(), json!(threads));
            }
            output::write_report(&path, out.command, out.config_echo, out.result, started)?;
        }
    }
    match out.invariant_failure {
        Some(detail) => Err(CliError::Invariant(detail)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli)
        .and_then(|(out, path, threads, seed, started)| emit(out, path, threads, seed, started));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
