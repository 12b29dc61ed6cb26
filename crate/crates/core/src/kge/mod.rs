//! Knowledge-graph embedding models.
//!
//! All five models score a triple so that higher means more plausible:
//!
//! | model    | score |
//! |----------|-------|
//! | TransE   | `-‖h + r - t‖₂` |
//! | DistMult | `Σ hᵢ rᵢ tᵢ` |
//! | ComplEx  | `Re(Σ hᵢ rᵢ conj(tᵢ))`, complex values stored as interleaved `(re, im)` pairs |
//! | SimplE   | `½(⟨H[h], R[r], T[t]⟩ + ⟨H[t], R⁻¹[r], T[h]⟩)` |
//! | ConvE    | `⟨relu(conv2d([h̄; r̄])) · W, t⟩ + b_t` |
//!
//! ConvE here is a single-channel, valid-padding variant without batch norm or
//! dropout, trained with the same per-triple negative sampling as the others.
//! Training is plain SGD; see [`train`].

mod checkpoint;
mod params;
mod sampling;
mod score;
mod store;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointHeader, TableHeader};
pub use params::{init_model, init_model_with_shape, ConvShape, ModelParameters, Table};
pub use sampling::{negative_sample, NegativeSample, SamplingPolicy, MAX_ATTEMPTS};
pub use score::{conve_min_preactivation, score, score_gradient, score_tails, GradBuffer};
pub use store::TripleStore;
pub use train::{train, EpochLoss, LossKind, TrainConfig, TrainReport, TrainedModel};

#[derive(Debug, Error)]
pub enum KgeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what} index {index} out of range (size {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("triple store is empty")]
    EmptyStore,
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    TransE,
    DistMult,
    ComplEx,
    SimplE,
    ConvE,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::TransE,
        ModelKind::DistMult,
        ModelKind::ComplEx,
        ModelKind::SimplE,
        ModelKind::ConvE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TransE => "TransE",
            ModelKind::DistMult => "DistMult",
            ModelKind::ComplEx => "ComplEx",
            ModelKind::SimplE => "SimplE",
            ModelKind::ConvE => "ConvE",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = KgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| KgeError::InvalidConfig(format!("unknown model `{s}`")))
    }
}
