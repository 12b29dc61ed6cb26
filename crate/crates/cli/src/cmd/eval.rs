use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mofkg::eval::{evaluate, render_table, CandidatePolicy, EvalSetting, MetricsReport, TiePolicy};
use mofkg::graph::Triple;
use mofkg::ingest::load_triples_tsv;
use mofkg::kge::TripleStore;
use serde::Serialize;

use super::serde_enum;
use crate::io::{load_graph, load_model, read_text, write_json, Dataset};

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["graph", "triples"])))]
pub struct Args {
    /// Checkpoint written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Graph the model was trained on; its triples are the known facts for
    /// filtering.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Triple file the model was trained on, instead of --graph.
    #[arg(long)]
    triples: Option<PathBuf>,
    /// Held-out triples (TSV) whose tails are ranked.
    #[arg(long)]
    test: PathBuf,
    /// `type-constrained` or `all-entities`.
    #[arg(long, default_value = "type-constrained", value_parser = serde_enum::<CandidatePolicy>)]
    candidates: CandidatePolicy,
    /// `realistic`, `optimistic` or `pessimistic`.
    #[arg(long, default_value = "realistic", value_parser = serde_enum::<TiePolicy>)]
    tie: TiePolicy,
    /// Rank against every candidate instead of filtering known triples.
    #[arg(long)]
    raw: bool,
    /// Metrics JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Serialize)]
struct Config<'a> {
    model: &'a Path,
    graph: Option<&'a Path>,
    triples: Option<&'a Path>,
    test: &'a Path,
    setting: EvalSetting,
    seed: u64,
}

#[derive(Serialize)]
struct Output<'a> {
    config: Config<'a>,
    metrics: MetricsReport,
}

pub fn run(args: Args) -> Result<()> {
    let ckpt = load_model(&args.model)?;
    let data = match (&args.graph, &args.triples) {
        (Some(p), _) => Dataset::from_graph(&load_graph(p, None)?),
        (None, Some(p)) => Dataset::from_tsv(p)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    data.check_compatible(&ckpt)?;

    let text = load_triples_tsv(&read_text(&args.test)?).with_context(|| format!("in `{}`", args.test.display()))?;
    let lookup = |name: &str, vocab: &mofkg::graph::Vocab, what: &str| {
        vocab
            .get(name)
            .with_context(|| format!("unknown {what} `{name}` in `{}`", args.test.display()))
    };
    let test = text
        .iter()
        .map(|t| {
            let (e, r) = (&data.projection.entities, &data.projection.relations);
            Ok(Triple::new(
                lookup(&t.head, e, "entity")?,
                lookup(&t.relation, r, "relation")?,
                lookup(&t.tail, e, "entity")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut known = data.projection.triples.clone();
    known.extend(&test);
    known.sort_unstable();
    known.dedup();
    // Domains come from the known triples so held-out tails stay candidates.
    let labels = data.store.labels().map(<[String]>::to_vec).unwrap_or_default();
    let filter = TripleStore::new(known, data.store.n_entities(), data.store.n_relations())?.with_labels(labels)?;

    let setting = EvalSetting {
        filtered: !args.raw,
        tie_policy: args.tie,
        candidates: args.candidates,
    };
    let metrics = evaluate(&ckpt.params, &test, &filter, setting)?.report;
    print!("{}", render_table(std::slice::from_ref(&metrics)));
    println!("MR {:.3} over {} queries", metrics.mean_rank, metrics.n);
    if let Some(out) = &args.out {
        let config = Config {
            model: &args.model,
            graph: args.graph.as_deref(),
            triples: args.triples.as_deref(),
            test: &args.test,
            setting,
            seed: args.seed,
        };
        write_json(out, &Output { config, metrics })?;
    }
    Ok(())
}
