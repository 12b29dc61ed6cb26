//! Python bindings: graphs, ingestion, text extraction, embedding models and
//! the synthetic benchmark.

use std::path::PathBuf;

use mofkg::bench::{generate, run_experiment, solvent_known_subgraph, BenchConfig, ExperimentSpec};
use mofkg::extract::{extract_document, Lexicon};
use mofkg::graph::{
    co_solvent_query, export_ndjson, import_ndjson, to_triples, GraphSchema, PropertyGraph, TripleProjection,
    HAS_SOLVENT,
};
use mofkg::ingest::{apply_mapping, default_csd_mapping, extract_crystal, MappingSpec, Source, Sources, Table};
use mofkg::kge::{
    load_checkpoint, save_checkpoint, score, score_tails, train, Checkpoint, ConvShape, ModelKind, TrainConfig,
    TripleStore,
};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts through JSON so nested records arrive as plain dicts and lists.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned + Default>(dict: Option<&Bound<'_, PyDict>>) -> PyResult<T> {
    let Some(dict) = dict else {
        return Ok(T::default());
    };
    let text: String = dict.py().import("json")?.call_method1("dumps", (dict,))?.extract()?;
    serde_json::from_str(&text).map_err(value_error)
}

/// A MOF property graph under the default schema.
#[pyclass(name = "Graph", module = "mofkg")]
struct PyGraph {
    inner: PropertyGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new() -> Self {
        PyGraph {
            inner: PropertyGraph::new(GraphSchema::mof_default()),
        }
    }

    #[staticmethod]
    fn from_ndjson(text: &str) -> PyResult<Self> {
        let inner = import_ndjson(text, GraphSchema::mof_default()).map_err(value_error)?;
        Ok(PyGraph { inner })
    }

    fn to_ndjson(&self) -> String {
        export_ndjson(&self.inner)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(value_error)
    }

    /// Maps CSV text onto the graph and returns the ingest report. Without a
    /// mapping, the CSD companion columns are expected.
    #[pyo3(signature = (csv_text, mapping_json = None, source = "csd"))]
    fn ingest_csv<'py>(
        &mut self,
        py: Python<'py>,
        csv_text: &str,
        mapping_json: Option<&str>,
        source: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let spec = match mapping_json {
            Some(text) => MappingSpec::from_json(text).map_err(value_error)?,
            None => default_csd_mapping(source),
        };
        let mut sources = Sources::new();
        sources.insert(
            source.to_owned(),
            Source::Table(Table::from_csv(csv_text).map_err(value_error)?),
        );
        spec.validate(self.inner.schema(), &sources).map_err(value_error)?;
        let report = apply_mapping(&spec, &sources, &mut self.inner).map_err(value_error)?;
        to_py(py, &report)
    }

    /// Pairs of MOFs sharing a solvent, with their authors and journals.
    fn co_solvent<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &co_solvent_query(&self.inner))
    }

    /// Every edge as a `(head, relation, tail)` triple of entity names.
    fn triples(&self) -> Vec<(String, String, String)> {
        let p = to_triples(&self.inner, None);
        p.triples
            .iter()
            .map(|t| {
                let t = p.to_text(t);
                (t.head, t.relation, t.tail)
            })
            .collect()
    }

    /// The subgraph around MOFs with a recorded solvent.
    fn solvent_known(&self) -> Self {
        PyGraph {
            inner: solvent_known_subgraph(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// A trained embedding model bound to the entity dictionary of a graph.
#[pyclass(name = "Model", module = "mofkg")]
struct PyModel {
    ckpt: Checkpoint,
    projection: TripleProjection,
    losses: Vec<f64>,
}

impl PyModel {
    fn entity(&self, name: &str) -> PyResult<usize> {
        self.projection
            .entities
            .get(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown entity `{name}`")))
    }

    fn relation(&self, name: &str) -> PyResult<usize> {
        self.projection
            .relations
            .get(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown relation `{name}`")))
    }
}

#[pymethods]
impl PyModel {
    /// Trains on every edge of `graph`. `model` is one of TransE, DistMult,
    /// ComplEx, SimplE or ConvE.
    #[staticmethod]
    #[pyo3(signature = (graph, model = "DistMult", dim = None, epochs = None, seed = 42))]
    fn train(
        py: Python<'_>,
        graph: &PyGraph,
        model: &str,
        dim: Option<usize>,
        epochs: Option<usize>,
        seed: u64,
    ) -> PyResult<Self> {
        let kind: ModelKind = model.parse().map_err(value_error)?;
        let mut config = TrainConfig::for_model(kind);
        config.seed = seed;
        if let Some(dim) = dim {
            config.dim = dim;
            config.conv = ConvShape::for_dim(dim);
        }
        config.epochs = epochs.unwrap_or(config.epochs);
        config.validate().map_err(value_error)?;
        let projection = to_triples(&graph.inner, None);
        let store = TripleStore::from_projection(&projection);
        let trained = py.detach(|| train(&store, &config)).map_err(value_error)?;
        let ckpt = Checkpoint::new(
            trained.params,
            seed,
            config.digest(),
            projection.entities.digest(),
            projection.relations.names().to_vec(),
        );
        let losses = trained.report.epochs.iter().map(|e| e.loss).collect();
        Ok(PyModel {
            ckpt,
            projection,
            losses,
        })
    }

    /// Loads a checkpoint and checks it against the graph it was trained on.
    #[staticmethod]
    fn load(path: PathBuf, graph: &PyGraph) -> PyResult<Self> {
        let ckpt = load_checkpoint(&path).map_err(value_error)?;
        let projection = to_triples(&graph.inner, None);
        if ckpt.header.entity_digest != projection.entities.digest()
            || ckpt.header.relation_names != projection.relations.names()
        {
            return Err(PyValueError::new_err(
                "checkpoint does not match the graph's dictionaries",
            ));
        }
        Ok(PyModel {
            ckpt,
            projection,
            losses: Vec::new(),
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_checkpoint(&path, &self.ckpt).map_err(value_error)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.ckpt.params.kind.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.ckpt.params.dim
    }

    /// Per-epoch training objective; empty for loaded models.
    #[getter]
    fn losses(&self) -> Vec<f64> {
        self.losses.clone()
    }

    /// Score of a triple given as entity names such as `MOF:ABCDEF`.
    fn score(&self, head: &str, relation: &str, tail: &str) -> PyResult<f64> {
        let (h, r, t) = (self.entity(head)?, self.relation(relation)?, self.entity(tail)?);
        score(&self.ckpt.params, h, r, t).map_err(value_error)
    }

    /// Best-scoring solvents the graph does not already link to `mof`.
    #[pyo3(signature = (mof, top = 10))]
    fn predict_solvents(&self, mof: &str, top: usize) -> PyResult<Vec<(String, f64)>> {
        let h = self.entity(&format!("MOF:{mof}"))?;
        let r = self.relation(HAS_SOLVENT)?;
        let scores = score_tails(&self.ckpt.params, h, r).map_err(value_error)?;
        let known: Vec<usize> = self
            .projection
            .triples
            .iter()
            .filter(|t| t.head == h && t.relation == r)
            .map(|t| t.tail)
            .collect();
        let mut ranked: Vec<(String, f64)> = self
            .projection
            .entities
            .names()
            .iter()
            .enumerate()
            .filter(|(i, name)| name.starts_with("Solvent:") && !known.contains(i))
            .map(|(i, name)| (name["Solvent:".len()..].to_owned(), scores[i]))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(top);
        Ok(ranked)
    }

    fn __repr__(&self) -> String {
        format!("Model(kind={}, dim={})", self.kind(), self.dim())
    }
}

/// Parses CIF text into a crystal record dict.
#[pyfunction]
fn parse_cif<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let doc = ::mofkg::ingest::parse_cif(text).map_err(value_error)?;
    let record = extract_crystal(&doc).map_err(value_error)?;
    to_py(py, &record)
}

/// Synthesis steps and solvent mentions of one paragraph.
#[pyfunction]
#[pyo3(signature = (text, doc_id = "doc"))]
fn extract<'py>(py: Python<'py>, text: &str, doc_id: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &extract_document(doc_id, text, &Lexicon::seed()))
}

/// A planted-signal synthetic graph. `config` holds bench fields such as
/// `rho`, `phi` and `seed`; missing fields take their defaults.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn generate_bench(config: Option<&Bound<'_, PyDict>>) -> PyResult<PyGraph> {
    let config: BenchConfig = from_py(config)?;
    let kg = generate(&config).map_err(value_error)?;
    Ok(PyGraph { inner: kg.graph })
}

/// Runs the solvent-prediction benchmark and returns the raw report.
#[pyfunction]
#[pyo3(signature = (config = None, models = None, repetitions = 3, dim = None, epochs = None))]
fn run_bench<'py>(
    py: Python<'py>,
    config: Option<&Bound<'py, PyDict>>,
    models: Option<Vec<String>>,
    repetitions: usize,
    dim: Option<usize>,
    epochs: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let bench: BenchConfig = from_py(config)?;
    let kinds: Vec<ModelKind> = match models {
        None => ModelKind::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| n.parse())
            .collect::<Result<_, _>>()
            .map_err(value_error)?,
    };
    let models = kinds
        .into_iter()
        .map(|kind| {
            let mut c = TrainConfig::for_model(kind);
            if let Some(dim) = dim {
                c.dim = dim;
                c.conv = ConvShape::for_dim(dim);
            }
            c.epochs = epochs.unwrap_or(c.epochs);
            c
        })
        .collect();
    let spec = ExperimentSpec::new(bench, models, repetitions);
    let report = py.detach(|| run_experiment(&spec)).map_err(value_error)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "mofkg")]
fn mofkg_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(parse_cif, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(generate_bench, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
