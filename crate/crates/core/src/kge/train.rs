use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::params::{init_model_with_shape, ConvShape, ModelParameters};
use super::sampling::{negative_sample, SamplingPolicy};
use super::score::{accumulate_gradient, score, GradBuffer};
use super::store::TripleStore;
use super::{KgeError, ModelKind};
use crate::graph::Triple;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// `max(0, γ - s(pos) + s(neg))` per (positive, negative) pair.
    Margin,
    /// `softplus(-s(pos)) + Σ softplus(s(neg))` per positive.
    Logistic,
}

impl LossKind {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::TransE => LossKind::Margin,
            _ => LossKind::Logistic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub negatives: usize,
    pub margin: f64,
    pub l2: f64,
    /// `None` picks margin loss for TransE and logistic loss otherwise.
    pub loss: Option<LossKind>,
    pub sampling: SamplingPolicy,
    pub seed: u64,
    pub conv: ConvShape,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelKind::DistMult,
            dim: 64,
            epochs: 200,
            learning_rate: 0.01,
            batch_size: 128,
            negatives: 1,
            margin: 1.0,
            l2: 1e-5,
            loss: None,
            sampling: SamplingPolicy::Uniform,
            seed: 42,
            conv: ConvShape::default(),
        }
    }
}

impl TrainConfig {
    pub fn for_model(model: ModelKind) -> Self {
        TrainConfig {
            model,
            ..TrainConfig::default()
        }
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss.unwrap_or_else(|| LossKind::default_for(self.model))
    }

    pub fn validate(&self) -> Result<(), KgeError> {
        let fail = |msg: String| Err(KgeError::InvalidConfig(msg));
        if self.dim == 0 {
            return fail("dimension must be at least 1".into());
        }
        if self.batch_size == 0 || self.negatives == 0 {
            return fail("batch size and negatives per positive must be at least 1".into());
        }
        for (name, v) in [
            ("learning rate", self.learning_rate),
            ("margin", self.margin),
            ("l2", self.l2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} must be a finite non-negative number, got {v}"));
            }
        }
        if self.model == ModelKind::ConvE {
            self.conv.validate(self.dim)?;
        }
        Ok(())
    }

    /// SHA-256 of the config's JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Objective after the epoch's updates: mean loss per positive triple,
    /// plus the L2 penalty. See [`train`] for the negatives it uses.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub epochs: Vec<EpochLoss>,
    pub wall_time_s: f64,
    /// Negatives returned without filtering after the attempt budget ran out.
    pub unfiltered_negatives: usize,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: ModelParameters,
    pub report: TrainReport,
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Loss of one positive against its negatives.
fn triple_loss(
    params: &ModelParameters,
    pos: &Triple,
    negs: &[Triple],
    kind: LossKind,
    margin: f64,
) -> Result<f64, KgeError> {
    let sp = score(params, pos.head, pos.relation, pos.tail)?;
    let mut loss = if kind == LossKind::Logistic { softplus(-sp) } else { 0.0 };
    for n in negs {
        let sn = score(params, n.head, n.relation, n.tail)?;
        loss += match kind {
            LossKind::Margin => (margin - sp + sn).max(0.0),
            LossKind::Logistic => softplus(sn),
        };
    }
    Ok(loss)
}

/// Corruption scores above which the trace falls back to sampled negatives.
const EXACT_TRACE_BUDGET: usize = 1 << 20;

/// Negatives the epoch objective is measured against.
enum Monitor {
    /// Expectation over every filtered corruption the sampler can produce.
    Exact,
    /// One fixed draw per positive, made before training.
    Fixed(Vec<Vec<Triple>>),
}

impl Monitor {
    fn new(store: &TripleStore, config: &TrainConfig) -> Self {
        if 2 * store.len() * store.n_entities() <= EXACT_TRACE_BUDGET {
            return Monitor::Exact;
        }
        let mut rng = rng::derived(config.seed, 2);
        Monitor::Fixed(
            store
                .triples()
                .iter()
                .map(|pos| {
                    (0..config.negatives)
                        .map(|_| negative_sample(pos, store, &mut rng, config.sampling).triple)
                        .collect()
                })
                .collect(),
        )
    }
}

/// Mean loss over the corruptions of one side of `pos`, as drawn by the
/// sampler under `policy`.
fn expected_side_loss(
    params: &ModelParameters,
    store: &TripleStore,
    pos: &Triple,
    head: bool,
    sp: f64,
    config: &TrainConfig,
) -> Result<f64, KgeError> {
    let domain = match config.sampling {
        SamplingPolicy::Uniform => None,
        SamplingPolicy::TypeConstrained if head => store.head_domain(pos.relation),
        SamplingPolicy::TypeConstrained => store.tail_domain(pos.relation),
    }
    .filter(|d| !d.is_empty());
    let all: Vec<usize>;
    let domain = match domain {
        Some(d) => d,
        None => {
            all = (0..store.n_entities()).collect();
            &all
        }
    };
    let (mut total, mut count) = (0.0, 0usize);
    for &e in domain {
        let c = if head {
            Triple::new(e, pos.relation, pos.tail)
        } else {
            Triple::new(pos.head, pos.relation, e)
        };
        if store.contains(&c) {
            continue;
        }
        let sn = score(params, c.head, c.relation, c.tail)?;
        total += match config.loss_kind() {
            LossKind::Margin => (config.margin - sp + sn).max(0.0),
            LossKind::Logistic => softplus(sn),
        };
        count += 1;
    }
    Ok(if count == 0 { 0.0 } else { total / count as f64 })
}

/// Full-pass objective per positive with every parameter under the L2
/// penalty.
fn objective(
    params: &ModelParameters,
    store: &TripleStore,
    monitor: &Monitor,
    config: &TrainConfig,
) -> Result<f64, KgeError> {
    let kind = config.loss_kind();
    let mut total = 0.0;
    for (i, pos) in store.triples().iter().enumerate() {
        total += match monitor {
            Monitor::Fixed(negs) => triple_loss(params, pos, &negs[i], kind, config.margin)?,
            Monitor::Exact => {
                let sp = score(params, pos.head, pos.relation, pos.tail)?;
                let mut loss = if kind == LossKind::Logistic { softplus(-sp) } else { 0.0 };
                for head in [true, false] {
                    loss += 0.5 * config.negatives as f64 * expected_side_loss(params, store, pos, head, sp, config)?;
                }
                loss
            }
        };
    }
    let norm: f64 = params.tables.iter().flat_map(|t| &t.data).map(|v| v * v).sum();
    Ok((total + config.l2 * norm) / store.len() as f64)
}

/// SGD step with the L2 penalty applied to the touched rows.
fn apply_update(params: &mut ModelParameters, grad: &mut GradBuffer, lr: f64, l2: f64) {
    for k in 0..grad.n_tables() {
        for idx in 0..grad.touched(k).len() {
            let i = grad.touched(k)[idx];
            let row = params.tables[k].row(i).to_vec();
            let g = grad.row_mut(k, i);
            let dest = params.tables[k].row_mut(i);
            for ((d, gv), v) in dest.iter_mut().zip(g.iter()).zip(&row) {
                *d -= lr * (gv + 2.0 * l2 * v);
            }
        }
    }
    grad.clear();
}

/// Mini-batch SGD over `store`.
///
/// Each epoch shuffles the triples with the seeded generator, draws
/// `negatives` corruptions per positive and steps on the summed batch loss.
/// TransE entity rows are projected onto the unit ball at the end of every
/// epoch. Parameters come from [`init_model_with_shape`] with the config seed;
/// shuffling and sampling use a separate stream of the same seed, so a run is
/// a pure function of `(store, config)`.
///
/// The loss recorded per epoch is the objective after that epoch. On small
/// stores it is the expectation over every corruption the sampler can
/// produce; past a fixed work budget it is measured against one set of
/// negatives drawn before training from a third stream of the seed.
pub fn train(store: &TripleStore, config: &TrainConfig) -> Result<TrainedModel, KgeError> {
    config.validate()?;
    if store.is_empty() {
        return Err(KgeError::EmptyStore);
    }
    let started = Instant::now();
    let mut params = init_model_with_shape(
        config.model,
        config.dim,
        store.n_entities(),
        store.n_relations(),
        config.conv,
        config.seed,
    )?;
    let mut rng = rng::derived(config.seed, 1);
    let monitor = Monitor::new(store, config);
    let mut grad = GradBuffer::new(&params);
    let loss_kind = config.loss_kind();
    let mut order: Vec<usize> = (0..store.len()).collect();
    let mut epochs = Vec::with_capacity(config.epochs);
    let mut unfiltered = 0;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            for &i in batch {
                let pos = store.triples()[i];
                let negs: Vec<_> = (0..config.negatives)
                    .map(|_| negative_sample(&pos, store, &mut rng, config.sampling))
                    .collect();
                unfiltered += negs.iter().filter(|n| n.unfiltered).count();
                let sp = score(&params, pos.head, pos.relation, pos.tail)?;
                match loss_kind {
                    LossKind::Margin => {
                        for n in &negs {
                            let t = n.triple;
                            let sn = score(&params, t.head, t.relation, t.tail)?;
                            if config.margin - sp + sn > 0.0 {
                                accumulate_gradient(&params, pos.head, pos.relation, pos.tail, -1.0, &mut grad);
                                accumulate_gradient(&params, t.head, t.relation, t.tail, 1.0, &mut grad);
                            }
                        }
                    }
                    LossKind::Logistic => {
                        accumulate_gradient(&params, pos.head, pos.relation, pos.tail, -sigmoid(-sp), &mut grad);
                        for n in &negs {
                            let t = n.triple;
                            let sn = score(&params, t.head, t.relation, t.tail)?;
                            accumulate_gradient(&params, t.head, t.relation, t.tail, sigmoid(sn), &mut grad);
                        }
                    }
                }
            }
            apply_update(&mut params, &mut grad, config.learning_rate, config.l2);
        }
        params.renormalize_entities();
        epochs.push(EpochLoss {
            epoch: epoch + 1,
            loss: objective(&params, store, &monitor, config)?,
        });
    }
    if !params.all_finite() {
        return Err(KgeError::InvalidConfig(
            "training diverged to non-finite parameters; lower the learning rate".into(),
        ));
    }
    Ok(TrainedModel {
        params,
        report: TrainReport {
            config: config.clone(),
            epochs,
            wall_time_s: started.elapsed().as_secs_f64(),
            unfiltered_negatives: unfiltered,
        },
    })
}
