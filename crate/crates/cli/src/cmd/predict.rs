use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use mofkg::graph::HAS_SOLVENT;
use mofkg::kge::score_tails;
use serde::Serialize;

use crate::io::{load_graph, load_model, write_json, Dataset};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Checkpoint written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Graph the model was trained on.
    #[arg(long)]
    graph: PathBuf,
    /// Refcode of the MOF.
    #[arg(long)]
    mof: String,
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Predictions JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Serialize)]
struct Prediction {
    rank: usize,
    solvent: String,
    score: f64,
}

#[derive(Serialize)]
struct Config<'a> {
    model: &'a Path,
    graph: &'a Path,
    mof: &'a str,
    top: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Output<'a> {
    config: Config<'a>,
    predictions: Vec<Prediction>,
}

pub fn run(args: Args) -> Result<()> {
    let ckpt = load_model(&args.model)?;
    let graph = load_graph(&args.graph, None)?;
    let data = Dataset::from_graph(&graph);
    data.check_compatible(&ckpt)?;
    let Some(mof_node) = graph.node_by_key("MOF", &args.mof) else {
        bail!("no MOF with refcode `{}` in `{}`", args.mof, args.graph.display());
    };
    let entities = &data.projection.entities;
    let mof = entities
        .get(&format!("MOF:{}", args.mof))
        .expect("every graph node is an entity");
    let rel = data.relation(HAS_SOLVENT)?;

    let known: Vec<&str> = graph
        .out_neighbors(mof_node, HAS_SOLVENT)
        .map(|s| graph.node(s).expect("edge endpoints exist").key.as_str())
        .collect();
    let scores = score_tails(&ckpt.params, mof, rel)?;
    let mut ranked: Vec<(f64, String)> = graph
        .nodes_with_label("Solvent")
        .filter(|s| !known.contains(&s.key.as_str()))
        .map(|s| {
            let idx = entities.get(&s.entity_name()).expect("every graph node is an entity");
            (scores[idx], s.key.clone())
        })
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let predictions: Vec<Prediction> = ranked
        .into_iter()
        .take(args.top)
        .enumerate()
        .map(|(i, (score, solvent))| Prediction {
            rank: i + 1,
            solvent,
            score,
        })
        .collect();

    if !known.is_empty() {
        println!("known: {}", known.join(", "));
    }
    for p in &predictions {
        println!("{}\t{}\t{:.6}", p.rank, p.solvent, p.score);
    }
    if let Some(out) = &args.out {
        let config = Config {
            model: &args.model,
            graph: &args.graph,
            mof: &args.mof,
            top: args.top,
            seed: args.seed,
        };
        write_json(out, &Output { config, predictions })?;
    }
    Ok(())
}
