use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mofkg::graph::{export_ndjson, PropertyGraph};
use mofkg::ingest::{apply_mapping, default_csd_mapping, parse_cif, IngestReport, MappingSpec, Source, Sources, Table};
use serde::Serialize;

use crate::io::{load_schema, read_text, sibling, write_json, write_text};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Graph schema JSON; the built-in MOF schema when omitted.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Mapping rules JSON; the built-in CSD mapping over source `csd` when omitted.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Named source, `NAME=PATH`. `.cif` files and directories of them are
    /// read as CIF, anything else as CSV. Repeat a name to merge CIF files.
    #[arg(long = "source", value_name = "NAME=PATH", required = true)]
    sources: Vec<String>,
    /// Graph export (NDJSON).
    #[arg(long)]
    out: PathBuf,
    /// Ingest report JSON; defaults to `<out stem>.report.json`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Serialize)]
struct Config<'a> {
    schema: Option<&'a Path>,
    mapping: Option<&'a Path>,
    sources: &'a [String],
    out: &'a Path,
    seed: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    config: Config<'a>,
    nodes: usize,
    edges: usize,
    ingest: IngestReport,
}

fn cif_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_owned()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("cif")))
        .collect();
    files.sort();
    Ok(files)
}

fn load_sources(specs: &[String]) -> Result<Sources> {
    let mut sources = Sources::new();
    for spec in specs {
        let Some((name, path)) = spec.split_once('=') else {
            bail!("--source expects NAME=PATH, got `{spec}`");
        };
        let path = Path::new(path);
        let is_cif = path.is_dir() || path.extension().is_some_and(|x| x.eq_ignore_ascii_case("cif"));
        if is_cif {
            let mut docs = Vec::new();
            for file in cif_files(path)? {
                let text = read_text(&file)?;
                docs.push(parse_cif(&text).with_context(|| format!("in `{}`", file.display()))?);
            }
            match sources
                .entry(name.to_owned())
                .or_insert_with(|| Source::Cif(Vec::new()))
            {
                Source::Cif(existing) => existing.extend(docs),
                Source::Table(_) => bail!("source `{name}` mixes CSV and CIF inputs"),
            }
        } else {
            if sources.contains_key(name) {
                bail!("source `{name}` given twice");
            }
            let table = Table::from_csv(&read_text(path)?).with_context(|| format!("in `{}`", path.display()))?;
            sources.insert(name.to_owned(), Source::Table(table));
        }
    }
    Ok(sources)
}

pub fn run(args: Args) -> Result<()> {
    let schema = load_schema(args.schema.as_deref())?;
    let spec = match &args.mapping {
        None => default_csd_mapping("csd"),
        Some(p) => MappingSpec::from_json(&read_text(p)?).with_context(|| format!("in `{}`", p.display()))?,
    };
    let sources = load_sources(&args.sources)?;
    spec.validate(&schema, &sources)?;
    let mut graph = PropertyGraph::new(schema);
    let ingest = apply_mapping(&spec, &sources, &mut graph)?;

    write_text(&args.out, &export_ndjson(&graph))?;
    let report_path = args.report.clone().unwrap_or_else(|| sibling(&args.out, "report.json"));
    println!(
        "{} nodes, {} edges, {} rows skipped -> {}",
        graph.node_count(),
        graph.edge_count(),
        ingest.rows_skipped,
        args.out.display()
    );
    for skip in &ingest.skipped {
        println!("  skipped row {} ({}): {}", skip.row, skip.rule, skip.reason);
    }
    let report = Report {
        config: Config {
            schema: args.schema.as_deref(),
            mapping: args.mapping.as_deref(),
            sources: &args.sources,
            out: &args.out,
            seed: args.seed,
        },
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        ingest,
    };
    write_json(&report_path, &report)
}
