use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mofkg::bench::split;
use mofkg::graph::{export_ndjson, TextTriple, HAS_SOLVENT};
use mofkg::ingest::write_triples_tsv;
use mofkg::kge::{
    save_checkpoint, train, Checkpoint, ConvShape, EpochLoss, LossKind, ModelKind, SamplingPolicy, TrainConfig,
};
use serde::Serialize;

use super::serde_enum;
use crate::io::{load_graph, sibling, write_json, write_text, Dataset};

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["graph", "triples"])))]
pub struct Args {
    /// Graph export (NDJSON); every edge becomes a triple.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Tab-separated `head relation tail` file with `Label:key` entity names.
    #[arg(long)]
    triples: Option<PathBuf>,
    /// TransE, DistMult, ComplEx, SimplE or ConvE.
    #[arg(long, default_value = "DistMult", value_parser = |s: &str| s.parse::<ModelKind>())]
    model: ModelKind,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long = "lr")]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Negatives per positive.
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    /// `margin` or `logistic`; margin for TransE and logistic otherwise when omitted.
    #[arg(long, value_parser = serde_enum::<LossKind>)]
    loss: Option<LossKind>,
    /// `uniform` or `type-constrained`.
    #[arg(long, value_parser = serde_enum::<SamplingPolicy>)]
    sampling: Option<SamplingPolicy>,
    /// ConvE reshape height. The reshape follows --dim when omitted.
    #[arg(long)]
    conv_rows: Option<usize>,
    /// ConvE reshape width.
    #[arg(long)]
    conv_cols: Option<usize>,
    #[arg(long)]
    conv_filters: Option<usize>,
    #[arg(long)]
    conv_kernel: Option<usize>,
    /// Hold out this fraction of HAS_SOLVENT triples before training.
    #[arg(long, requires = "test_out")]
    test_fraction: Option<f64>,
    /// Held-out triples (TSV).
    #[arg(long, requires = "test_fraction")]
    test_out: Option<PathBuf>,
    /// The input graph without the held-out edges.
    #[arg(long, requires_all = ["test_fraction", "graph"])]
    train_graph_out: Option<PathBuf>,
    /// Checkpoint file.
    #[arg(long)]
    out: PathBuf,
    /// Training report JSON; defaults to `<out stem>.report.json`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl Args {
    fn config(&self) -> TrainConfig {
        let mut c = TrainConfig::for_model(self.model);
        c.seed = self.seed;
        macro_rules! apply {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        if let Some(dim) = self.dim {
            c.dim = dim;
            c.conv = ConvShape::for_dim(dim);
        }
        apply!(
            epochs => c.epochs,
            learning_rate => c.learning_rate,
            batch_size => c.batch_size,
            negatives => c.negatives,
            margin => c.margin,
            l2 => c.l2,
            sampling => c.sampling,
            conv_rows => c.conv.rows,
            conv_cols => c.conv.cols,
            conv_filters => c.conv.filters,
            conv_kernel => c.conv.kernel,
        );
        if self.loss.is_some() {
            c.loss = self.loss;
        }
        c
    }
}

#[derive(Serialize)]
struct Config<'a> {
    graph: Option<&'a Path>,
    triples: Option<&'a Path>,
    test_fraction: Option<f64>,
    train: &'a TrainConfig,
    seed: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    config: Config<'a>,
    entities: usize,
    relations: &'a [String],
    train_triples: usize,
    test_triples: usize,
    epochs: &'a [EpochLoss],
    unfiltered_negatives: usize,
}

pub fn run(args: Args) -> Result<()> {
    let config = args.config();
    config.validate()?;
    let graph = args.graph.as_deref().map(|p| load_graph(p, None)).transpose()?;
    let data = match (&graph, &args.triples) {
        (Some(g), _) => Dataset::from_graph(g),
        (None, Some(p)) => Dataset::from_tsv(p)?,
        (None, None) => unreachable!("clap requires one input"),
    };

    let (train_store, test) = match args.test_fraction {
        None => (data.store.clone(), Vec::new()),
        Some(fraction) => {
            let rel = data.relation(HAS_SOLVENT)?;
            let (train_triples, test) = split(&data.projection.triples, rel, HAS_SOLVENT, fraction, args.seed)?;
            (data.store.subset(train_triples)?, test)
        }
    };
    if let Some(path) = &args.test_out {
        let text: Vec<TextTriple> = test.iter().map(|t| data.projection.to_text(t)).collect();
        write_text(path, &write_triples_tsv(&text))?;
    }
    if let (Some(path), Some(g)) = (&args.train_graph_out, &graph) {
        let held_out: BTreeSet<(String, String, String)> = test
            .iter()
            .map(|t| {
                let t = data.projection.to_text(t);
                (t.relation, t.head, t.tail)
            })
            .collect();
        let kept = g.filter_edges(|e| {
            let name = |id| g.node(id).expect("edge endpoints exist").entity_name();
            !held_out.contains(&(e.relation.clone(), name(e.source), name(e.target)))
        });
        write_text(path, &export_ndjson(&kept))?;
    }

    let trained = train(&train_store, &config).context("training failed")?;
    let ckpt = Checkpoint::new(
        trained.params,
        config.seed,
        config.digest(),
        data.projection.entities.digest(),
        data.projection.relations.names().to_vec(),
    );
    save_checkpoint(&args.out, &ckpt)?;

    let epochs = &trained.report.epochs;
    println!(
        "{} on {} triples ({} held out), {} entities: loss {:.4} -> {:.4} in {:.1} s",
        config.model,
        train_store.len(),
        test.len(),
        train_store.n_entities(),
        epochs.first().map_or(f64::NAN, |e| e.loss),
        epochs.last().map_or(f64::NAN, |e| e.loss),
        trained.report.wall_time_s
    );
    let report = Report {
        config: Config {
            graph: args.graph.as_deref(),
            triples: args.triples.as_deref(),
            test_fraction: args.test_fraction,
            train: &config,
            seed: args.seed,
        },
        entities: train_store.n_entities(),
        relations: data.projection.relations.names(),
        train_triples: train_store.len(),
        test_triples: test.len(),
        epochs,
        unfiltered_negatives: trained.report.unfiltered_negatives,
    };
    let report_path = args.report.clone().unwrap_or_else(|| sibling(&args.out, "report.json"));
    write_json(&report_path, &report)
}
