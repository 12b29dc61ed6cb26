use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::ValueEnum;
use mofkg::graph::co_solvent_query;
use serde::Serialize;

use crate::io::{load_graph, write_json};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum QueryKind {
    /// Pairs of MOFs sharing a solvent, with their authors and journals.
    CoSolvent,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Graph export (NDJSON).
    #[arg(long)]
    graph: PathBuf,
    /// Graph schema JSON; the built-in MOF schema when omitted.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = QueryKind::CoSolvent)]
    query: QueryKind,
    /// Result JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Serialize)]
struct Config<'a> {
    graph: &'a Path,
    schema: Option<&'a Path>,
    query: QueryKind,
    seed: u64,
}

#[derive(Serialize)]
struct Output<'a, T> {
    config: Config<'a>,
    results: T,
}

pub fn run(args: Args) -> Result<()> {
    let graph = load_graph(&args.graph, args.schema.as_deref())?;
    let records = match args.query {
        QueryKind::CoSolvent => co_solvent_query(&graph),
    };
    println!("{} MOF pairs share a solvent", records.len());
    for r in &records {
        println!(
            "{} | {} | {} | {} / {}",
            r.mof_a,
            r.mof_b,
            r.solvents.join(", "),
            r.journals_a.join("; "),
            r.journals_b.join("; ")
        );
    }
    if let Some(out) = &args.out {
        let config = Config {
            graph: &args.graph,
            schema: args.schema.as_deref(),
            query: args.query,
            seed: args.seed,
        };
        write_json(
            out,
            &Output {
                config,
                results: &records,
            },
        )?;
    }
    Ok(())
}
