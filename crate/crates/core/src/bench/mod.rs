//! Synthetic MOF graphs with planted solvent communities, and the end-to-end
//! experiment: generate, split the `HAS_SOLVENT` triples, train, evaluate.

mod experiment;
mod generate;
mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use experiment::{
    render_comparison, run_experiment, thread_count, ComparisonReport, ExperimentSpec, MetricSummary, ModelSummary,
    RunRecord, Stat,
};
pub use generate::{generate, generate_kg, solvent_known_subgraph, SyntheticKg};
pub use split::{round_half_even, split};

use crate::eval::EvalError;
use crate::kge::KgeError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} `{relation}` triples to split, found {found}")]
    TooFewTriples {
        relation: String,
        needed: usize,
        found: usize,
    },
    #[error(transparent)]
    Kge(#[from] KgeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub mofs: usize,
    pub solvents: usize,
    pub communities: usize,
    pub authors: usize,
    pub journals: usize,
    pub publications: usize,
    /// Size of the element alphabet for atom nodes.
    pub elements: usize,
    pub authors_per_publication: usize,
    /// Probability that a MOF's solvent is its community's signature solvent.
    pub rho: f64,
    /// Fraction of MOFs with a recorded solvent.
    pub phi: f64,
    pub test_fraction: f64,
    pub include_bonds: bool,
    /// Train and evaluate on the neighbourhood of solvent-known MOFs only.
    pub restrict_to_solvent_known: bool,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            mofs: 8933,
            solvents: 15,
            communities: 12,
            authors: 240,
            journals: 20,
            publications: 4467,
            elements: 30,
            authors_per_publication: 3,
            rho: 0.9,
            phi: 0.03,
            test_fraction: 0.2,
            include_bonds: true,
            restrict_to_solvent_known: true,
            seed: 42,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let counts = [
            ("mofs", self.mofs),
            ("solvents", self.solvents),
            ("communities", self.communities),
            ("authors", self.authors),
            ("journals", self.journals),
            ("publications", self.publications),
            ("elements", self.elements),
            ("authors_per_publication", self.authors_per_publication),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(BenchError::InvalidConfig(format!("{name} must be at least 1")));
        }
        if self.publications > self.mofs {
            return Err(BenchError::InvalidConfig(format!(
                "{} publications for {} MOFs would leave publications without a MOF",
                self.publications, self.mofs
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(BenchError::InvalidConfig(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if !(self.phi > 0.0 && self.phi <= 1.0) {
            return Err(BenchError::InvalidConfig(format!(
                "phi must lie in (0, 1], got {}",
                self.phi
            )));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(BenchError::InvalidConfig(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.solvent_known_count() == 0 {
            return Err(BenchError::InvalidConfig(
                "phi leaves no MOF with a known solvent".into(),
            ));
        }
        Ok(())
    }

    /// `round(phi · mofs)`, ties to even.
    pub fn solvent_known_count(&self) -> usize {
        round_half_even(self.phi * self.mofs as f64)
    }
}
