use std::path::PathBuf;

use anyhow::{Context, Result};
use mofkg::bench::{generate, render_comparison, run_experiment, solvent_known_subgraph, BenchConfig, ExperimentSpec};
use mofkg::eval::CandidatePolicy;
use mofkg::graph::export_ndjson;
use mofkg::kge::{ConvShape, ModelKind, TrainConfig};

use crate::io::{read_text, write_json, write_text};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Bench configuration JSON; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Probability that a MOF's solvent is its community's signature solvent.
    #[arg(long)]
    rho: Option<f64>,
    /// Fraction of MOFs with a recorded solvent.
    #[arg(long)]
    phi: Option<f64>,
    /// First seed; repetition k uses seed + k. Defaults to the config's seed (42).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    /// Comma-separated model names.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "TransE,DistMult,ComplEx,SimplE,ConvE",
        value_parser = |s: &str| s.parse::<ModelKind>()
    )]
    models: Vec<ModelKind>,
    /// Override the embedding dimension of every model; ConvE gets the most
    /// square reshape.
    #[arg(long)]
    dim: Option<usize>,
    /// Override the epoch count of every model.
    #[arg(long)]
    epochs: Option<usize>,
    /// Raw comparison report JSON.
    #[arg(long)]
    out: PathBuf,
    /// Plain-text grids for both candidate sets.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Export the graph generated for the first seed.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

fn grids(report: &mofkg::bench::ComparisonReport) -> String {
    let mut text = String::new();
    for (title, policy) in [
        ("type-constrained candidates", CandidatePolicy::TypeConstrained),
        ("all-entity candidates", CandidatePolicy::AllEntities),
    ] {
        text.push_str(&format!("{title}\n{}\n", render_comparison(report, policy)));
    }
    text
}

pub fn run(args: Args) -> Result<()> {
    let mut bench: BenchConfig = match &args.config {
        None => BenchConfig::default(),
        Some(p) => serde_json::from_str(&read_text(p)?).with_context(|| format!("in `{}`", p.display()))?,
    };
    if let Some(rho) = args.rho {
        bench.rho = rho;
    }
    if let Some(phi) = args.phi {
        bench.phi = phi;
    }
    if let Some(seed) = args.seed {
        bench.seed = seed;
    }
    let models = args
        .models
        .iter()
        .map(|&kind| {
            let mut c = TrainConfig::for_model(kind);
            if let Some(dim) = args.dim {
                c.dim = dim;
                c.conv = ConvShape::for_dim(dim);
            }
            c.epochs = args.epochs.unwrap_or(c.epochs);
            c
        })
        .collect();
    let spec = ExperimentSpec::new(bench, models, args.repetitions);
    spec.validate()?;

    if let Some(path) = &args.graph_out {
        let kg = generate(&spec.bench)?;
        let graph = if spec.bench.restrict_to_solvent_known {
            solvent_known_subgraph(&kg.graph)
        } else {
            kg.graph
        };
        write_text(path, &export_ndjson(&graph))?;
    }

    let report = run_experiment(&spec)?;
    let text = grids(&report);
    print!("{text}");
    if let Some(path) = &args.table {
        write_text(path, &text)?;
    }
    write_json(&args.out, &report)
}
