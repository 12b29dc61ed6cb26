//! `mofkg`: batch workflows over the MOF knowledge graph.
//!
//! Exit codes: 0 on success, 1 for user errors (bad flags, unreadable or
//! malformed inputs, failed validation), 2 for internal errors. Setting
//! `MOFKG_FAULT=panic` forces an internal error, for testing the contract.

mod cmd;
mod io;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mofkg", version, about = "Build, mine and embed MOF knowledge graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map CSV and CIF sources onto a property graph.
    Ingest(cmd::ingest::Args),
    /// Extract synthesis steps and solvents from paragraphs.
    Extract(cmd::extract::Args),
    /// Run a canned graph query.
    Query(cmd::query::Args),
    /// Train an embedding model on a graph or triple file.
    Train(cmd::train::Args),
    /// Rank held-out triples with a trained model.
    Eval(cmd::eval::Args),
    /// Run the synthetic solvent-prediction benchmark.
    Bench(cmd::bench::Args),
    /// List the most plausible solvents for one MOF.
    Predict(cmd::predict::Args),
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MOFKG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("MOFKG_THREADS must be a non-negative integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if std::env::var("MOFKG_FAULT").as_deref() == Ok("panic") {
        panic!("injected fault");
    }
    configure_threads()?;
    match cli.command {
        Command::Ingest(a) => cmd::ingest::run(a),
        Command::Extract(a) => cmd::extract::run(a),
        Command::Query(a) => cmd::query::run(a),
        Command::Train(a) => cmd::train::run(a),
        Command::Eval(a) => cmd::eval::run(a),
        Command::Bench(a) => cmd::bench::run(a),
        Command::Predict(a) => cmd::predict::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(move |info| {
        eprintln!("internal error (please report):");
        default_hook(info);
    }));
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}
