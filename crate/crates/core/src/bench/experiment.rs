use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate, solvent_known_subgraph};
use super::split::split;
use super::{BenchConfig, BenchError};
use crate::eval::table::{grid, COLUMNS};
use crate::eval::{evaluate, pairwise_sum, CandidatePolicy, EvalSetting, MetricsReport};
use crate::graph::{to_triples, HAS_SOLVENT};
use crate::kge::{train, TrainConfig, TripleStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub bench: BenchConfig,
    /// One training configuration per model; each run overrides the seed.
    pub models: Vec<TrainConfig>,
    /// One repetition per seed. The seed drives generation, the split and
    /// training alike.
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    /// `repetitions` consecutive seeds starting at `bench.seed`.
    pub fn new(bench: BenchConfig, models: Vec<TrainConfig>, repetitions: usize) -> Self {
        let seeds = (0..repetitions as u64).map(|k| bench.seed + k).collect();
        ExperimentSpec { bench, models, seeds }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.models.is_empty() || self.seeds.is_empty() {
            return Err(BenchError::InvalidConfig(
                "an experiment needs at least one model and one seed".into(),
            ));
        }
        self.bench.validate()?;
        for m in &self.models {
            m.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
            (pairwise_sum(&sq) / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mrr: Stat,
    pub amri: Stat,
    pub hits_10: Stat,
    pub hits_5: Stat,
    pub hits_1: Stat,
    pub mean_rank: Stat,
}

impl MetricSummary {
    fn of(reports: &[&MetricsReport]) -> Self {
        let stat = |f: &dyn Fn(&MetricsReport) -> f64| Stat::of(&reports.iter().map(|r| f(r)).collect::<Vec<_>>());
        MetricSummary {
            mrr: stat(&|r| r.mrr),
            amri: stat(&|r| r.amri),
            hits_10: stat(&|r| r.hits_at(10)),
            hits_5: stat(&|r| r.hits_at(5)),
            hits_1: stat(&|r| r.hits_at(1)),
            mean_rank: stat(&|r| r.mean_rank),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub model: String,
    pub train_triples: usize,
    pub test_triples: usize,
    pub entities: usize,
    pub final_loss: f64,
    pub unfiltered_negatives: usize,
    pub type_constrained: MetricsReport,
    pub all_entities: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    pub runs: usize,
    pub type_constrained: MetricSummary,
    pub all_entities: MetricSummary,
}

impl ModelSummary {
    pub fn for_policy(&self, policy: CandidatePolicy) -> &MetricSummary {
        match policy {
            CandidatePolicy::TypeConstrained => &self.type_constrained,
            CandidatePolicy::AllEntities => &self.all_entities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spec: ExperimentSpec,
    pub models: Vec<ModelSummary>,
    pub runs: Vec<RunRecord>,
}

impl ComparisonReport {
    pub fn model(&self, name: &str) -> Option<&ModelSummary> {
        self.models.iter().find(|m| m.model == name)
    }
}

/// Thread cap from `MOFKG_THREADS`: `Some(0)` means sequential, `None` when
/// unset or unparsable.
pub fn thread_count() -> Option<usize> {
    std::env::var("MOFKG_THREADS").ok()?.trim().parse().ok()
}

fn run_seed(spec: &ExperimentSpec, seed: u64) -> Result<Vec<RunRecord>, BenchError> {
    let bench = BenchConfig {
        seed,
        ..spec.bench.clone()
    };
    let kg = generate(&bench)?;
    let graph = if bench.restrict_to_solvent_known {
        solvent_known_subgraph(&kg.graph)
    } else {
        kg.graph
    };
    let projection = to_triples(&graph, None);
    let full = TripleStore::from_projection(&projection);
    let rel = projection
        .relations
        .get(HAS_SOLVENT)
        .ok_or_else(|| BenchError::TooFewTriples {
            relation: HAS_SOLVENT.into(),
            needed: 5,
            found: 0,
        })?;
    let (train_triples, test) = split(&projection.triples, rel, HAS_SOLVENT, bench.test_fraction, seed)?;
    let train_store = full.subset(train_triples)?;

    spec.models
        .iter()
        .map(|model| {
            let config = TrainConfig { seed, ..model.clone() };
            let trained = train(&train_store, &config)?;
            let eval = |candidates| {
                let setting = EvalSetting {
                    candidates,
                    ..EvalSetting::default()
                };
                evaluate(&trained.params, &test, &full, setting).map(|e| e.report)
            };
            Ok(RunRecord {
                seed,
                model: config.model.name().to_owned(),
                train_triples: train_store.len(),
                test_triples: test.len(),
                entities: full.n_entities(),
                final_loss: trained.report.epochs.last().map_or(f64::NAN, |e| e.loss),
                unfiltered_negatives: trained.report.unfiltered_negatives,
                type_constrained: eval(CandidatePolicy::TypeConstrained)?,
                all_entities: eval(CandidatePolicy::AllEntities)?,
            })
        })
        .collect()
}

/// Runs every model on every seed and summarises the metrics per model.
///
/// Seeds run in parallel on the current rayon pool; records are assembled in
/// seed order and no timing enters the report, so equal specs give equal
/// reports.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ComparisonReport, BenchError> {
    spec.validate()?;
    let per_seed: Vec<Vec<RunRecord>> = if thread_count() == Some(0) {
        spec.seeds
            .iter()
            .map(|&s| run_seed(spec, s))
            .collect::<Result<_, _>>()?
    } else {
        spec.seeds
            .par_iter()
            .map(|&s| run_seed(spec, s))
            .collect::<Result<_, _>>()?
    };
    let runs: Vec<RunRecord> = per_seed.into_iter().flatten().collect();

    let mut seen = BTreeSet::new();
    let models = spec
        .models
        .iter()
        .map(|m| m.model.name())
        .filter(|name| seen.insert(*name))
        .map(|name| {
            let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.model == name).collect();
            ModelSummary {
                model: name.to_owned(),
                runs: mine.len(),
                type_constrained: MetricSummary::of(&mine.iter().map(|r| &r.type_constrained).collect::<Vec<_>>()),
                all_entities: MetricSummary::of(&mine.iter().map(|r| &r.all_entities).collect::<Vec<_>>()),
            }
        })
        .collect();
    Ok(ComparisonReport {
        spec: spec.clone(),
        models,
        runs,
    })
}

/// `Model | MRR | AMRI | Hits@10 | Hits@5 | Hits@1` grid of `mean ± std`
/// cells for one candidate policy.
pub fn render_comparison(report: &ComparisonReport, policy: CandidatePolicy) -> String {
    let cell = |s: Stat| format!("{:.3} ± {:.3}", s.mean, s.std);
    let rows: Vec<[String; 6]> = report
        .models
        .iter()
        .map(|m| {
            let s = m.for_policy(policy);
            [
                m.model.clone(),
                cell(s.mrr),
                cell(s.amri),
                cell(s.hits_10),
                cell(s.hits_5),
                cell(s.hits_1),
            ]
        })
        .collect();
    grid(&COLUMNS.map(String::from), &rows)
}
