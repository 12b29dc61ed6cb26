use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mofkg::extract::{bundled_corpus, extract_document, to_graph_fragments, DocumentExtraction, Lexicon};
use mofkg::graph::export_ndjson;
use mofkg::ingest::IngestReport;
use serde::{Deserialize, Serialize};

use crate::io::{load_graph, read_text, write_json, write_text};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Paragraphs to process: a JSON array of `{doc_id, text, refcode?}` or a
    /// plain-text file holding one paragraph. The bundled corpus when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Lexicon JSON; the seed lexicon when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Extraction JSON.
    #[arg(long)]
    out: PathBuf,
    /// Graph to attach solvent fragments to (requires --graph-out).
    #[arg(long, requires = "graph_out")]
    graph: Option<PathBuf>,
    /// MOF refcode for every paragraph, overriding per-document refcodes.
    #[arg(long)]
    mof: Option<String>,
    /// Updated graph export.
    #[arg(long, requires = "graph")]
    graph_out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
struct InputDoc {
    doc_id: String,
    text: String,
    #[serde(default)]
    refcode: Option<String>,
}

#[derive(Serialize)]
struct Config<'a> {
    input: Option<&'a Path>,
    lexicon: Option<&'a Path>,
    graph: Option<&'a Path>,
    mof: Option<&'a str>,
    seed: u64,
}

#[derive(Serialize)]
struct Output<'a> {
    config: Config<'a>,
    documents: Vec<DocumentExtraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fragments: Option<IngestReport>,
}

fn load_input(path: Option<&Path>) -> Result<Vec<InputDoc>> {
    let Some(path) = path else {
        return Ok(bundled_corpus()
            .into_iter()
            .map(|d| InputDoc {
                doc_id: d.doc_id,
                text: d.text,
                refcode: Some(d.refcode),
            })
            .collect());
    };
    let text = read_text(path)?;
    if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("json")) {
        return serde_json::from_str(&text).with_context(|| format!("in `{}`", path.display()));
    }
    let doc_id = path
        .file_stem()
        .map_or_else(|| "doc".into(), |s| s.to_string_lossy().into_owned());
    Ok(vec![InputDoc {
        doc_id,
        text,
        refcode: None,
    }])
}

pub fn run(args: Args) -> Result<()> {
    let lexicon = match &args.lexicon {
        None => Lexicon::seed(),
        Some(p) => Lexicon::from_json(&read_text(p)?).with_context(|| format!("in `{}`", p.display()))?,
    };
    let docs = load_input(args.input.as_deref())?;
    let documents: Vec<DocumentExtraction> = docs
        .iter()
        .map(|d| extract_document(&d.doc_id, &d.text, &lexicon))
        .collect();
    for d in &documents {
        let solvents: Vec<&str> = d.solvents.iter().map(|m| m.canonical.as_str()).collect();
        println!(
            "{}: {} steps, solvents [{}]",
            d.doc_id,
            d.steps.len(),
            solvents.join(", ")
        );
    }

    let mut fragments = None;
    if let (Some(graph_path), Some(graph_out)) = (&args.graph, &args.graph_out) {
        let mut graph = load_graph(graph_path, None)?;
        let mut report = IngestReport::default();
        for (doc, extraction) in docs.iter().zip(&documents) {
            let Some(key) = args.mof.as_deref().or(doc.refcode.as_deref()) else {
                bail!("document `{}` has no refcode; pass --mof", doc.doc_id);
            };
            report.merge(to_graph_fragments(key, &extraction.solvents, &mut graph)?);
        }
        println!(
            "{} solvent nodes, {} edges added",
            report.nodes_created, report.edges_created
        );
        write_text(graph_out, &export_ndjson(&graph))?;
        fragments = Some(report);
    }

    let output = Output {
        config: Config {
            input: args.input.as_deref(),
            lexicon: args.lexicon.as_deref(),
            graph: args.graph.as_deref(),
            mof: args.mof.as_deref(),
            seed: args.seed,
        },
        documents,
        fragments,
    };
    write_json(&args.out, &output)
}
