use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{KgeError, ModelKind};
use crate::rng;

/// Row-major `rows × cols` matrix of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Table {
    fn zeros(name: &'static str, rows: usize, cols: usize) -> Self {
        Table {
            name,
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// ConvE reshape and filter bank: embeddings are viewed as `rows × cols`
/// images, head stacked above relation, and convolved with `filters` kernels
/// of size `kernel × kernel` without padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvShape {
    pub rows: usize,
    pub cols: usize,
    pub filters: usize,
    pub kernel: usize,
}

impl Default for ConvShape {
    fn default() -> Self {
        ConvShape {
            rows: 8,
            cols: 8,
            filters: 8,
            kernel: 3,
        }
    }
}

impl ConvShape {
    /// The most square `rows × cols = dim` reshape, with the default filter
    /// count and the default kernel shrunk to fit.
    pub fn for_dim(dim: usize) -> Self {
        let rows = (1..=dim)
            .take_while(|r| r * r <= dim)
            .filter(|r| dim % r == 0)
            .last()
            .unwrap_or(1);
        let cols = dim / rows.max(1);
        let default = ConvShape::default();
        ConvShape {
            rows,
            cols,
            filters: default.filters,
            kernel: default.kernel.min(cols).min(2 * rows).max(1),
        }
    }

    pub fn out_rows(&self) -> usize {
        2 * self.rows + 1 - self.kernel
    }

    pub fn out_cols(&self) -> usize {
        self.cols + 1 - self.kernel
    }

    /// Length of the flattened feature map.
    pub fn features(&self) -> usize {
        self.filters * self.out_rows() * self.out_cols()
    }

    pub fn validate(&self, dim: usize) -> Result<(), KgeError> {
        if self.rows * self.cols != dim {
            return Err(KgeError::InvalidConfig(format!(
                "ConvE reshape {}x{} does not match dimension {dim}",
                self.rows, self.cols
            )));
        }
        if self.filters == 0 || self.kernel == 0 || self.kernel > self.cols || self.kernel > 2 * self.rows {
            return Err(KgeError::InvalidConfig(format!(
                "ConvE needs at least one filter and a kernel that fits the {}x{} input (got {} filters of size {})",
                2 * self.rows,
                self.cols,
                self.filters,
                self.kernel
            )));
        }
        Ok(())
    }
}

// Table layout per model.
pub(crate) const ENT: usize = 0;
pub(crate) const REL: usize = 1;
pub(crate) const SIMPLE_TAIL: usize = 1;
pub(crate) const SIMPLE_REL: usize = 2;
pub(crate) const SIMPLE_REL_INV: usize = 3;
pub(crate) const CONV_FILTERS: usize = 2;
pub(crate) const CONV_FILTER_BIAS: usize = 3;
pub(crate) const CONV_PROJECTION: usize = 4;
pub(crate) const CONV_ENTITY_BIAS: usize = 5;

/// Embedding tables for one model.
///
/// | model | tables |
/// |-------|--------|
/// | TransE, DistMult | `entity E×d`, `relation R×d` |
/// | ComplEx | `entity E×2d`, `relation R×2d` (interleaved re, im) |
/// | SimplE | `entity_head E×d`, `entity_tail E×d`, `relation R×d`, `relation_inverse R×d` |
/// | ConvE | `entity E×d`, `relation R×d`, `filters F×k²`, `filter_bias F×1`, `projection P×d`, `entity_bias E×1` |
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub kind: ModelKind,
    pub dim: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub conv: Option<ConvShape>,
    pub tables: Vec<Table>,
}

impl ModelParameters {
    /// Zero-filled tables with the layout of `kind`.
    pub fn zeros(
        kind: ModelKind,
        dim: usize,
        n_entities: usize,
        n_relations: usize,
        conv: ConvShape,
    ) -> Result<Self, KgeError> {
        if dim == 0 || n_entities == 0 || n_relations == 0 {
            return Err(KgeError::InvalidConfig(format!(
                "dimension, entity count and relation count must be positive (got {dim}, {n_entities}, {n_relations})"
            )));
        }
        let (e, r, d) = (n_entities, n_relations, dim);
        let tables = match kind {
            ModelKind::TransE | ModelKind::DistMult => {
                vec![Table::zeros("entity", e, d), Table::zeros("relation", r, d)]
            }
            ModelKind::ComplEx => vec![Table::zeros("entity", e, 2 * d), Table::zeros("relation", r, 2 * d)],
            ModelKind::SimplE => vec![
                Table::zeros("entity_head", e, d),
                Table::zeros("entity_tail", e, d),
                Table::zeros("relation", r, d),
                Table::zeros("relation_inverse", r, d),
            ],
            ModelKind::ConvE => {
                conv.validate(d)?;
                vec![
                    Table::zeros("entity", e, d),
                    Table::zeros("relation", r, d),
                    Table::zeros("filters", conv.filters, conv.kernel * conv.kernel),
                    Table::zeros("filter_bias", conv.filters, 1),
                    Table::zeros("projection", conv.features(), d),
                    Table::zeros("entity_bias", e, 1),
                ]
            }
        };
        Ok(ModelParameters {
            kind,
            dim,
            n_entities,
            n_relations,
            conv: (kind == ModelKind::ConvE).then_some(conv),
            tables,
        })
    }

    pub fn conv_shape(&self) -> ConvShape {
        self.conv.expect("ConvE parameters carry a shape")
    }

    pub fn param_count(&self) -> usize {
        self.tables.iter().map(|t| t.data.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tables.iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn check_triple(&self, h: usize, r: usize, t: usize) -> Result<(), KgeError> {
        for (what, index, len) in [
            ("entity", h, self.n_entities),
            ("relation", r, self.n_relations),
            ("entity", t, self.n_entities),
        ] {
            if index >= len {
                return Err(KgeError::IndexOutOfRange { what, index, len });
            }
        }
        Ok(())
    }

    /// Scales every entity row of a TransE model onto the unit ball.
    pub fn renormalize_entities(&mut self) {
        if self.kind != ModelKind::TransE {
            return;
        }
        let table = &mut self.tables[ENT];
        for i in 0..table.rows {
            let row = table.row_mut(i);
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
}

fn fill_uniform(table: &mut Table, bound: f64, rng: &mut rng::Rng) {
    for v in &mut table.data {
        *v = rng.random_range(-bound..bound);
    }
}

/// Seeded initialisation with the default ConvE shape.
pub fn init_model(
    kind: ModelKind,
    dim: usize,
    n_entities: usize,
    n_relations: usize,
    seed: u64,
) -> Result<ModelParameters, KgeError> {
    init_model_with_shape(kind, dim, n_entities, n_relations, ConvShape::default(), seed)
}

/// Seeded initialisation from ChaCha8 (`seed_from_u64(seed)`), tables drawn in
/// layout order.
///
/// Embedding tables are uniform on `[-6/√d, 6/√d]` and TransE relation rows are
/// then scaled to unit length. ConvE filters and projection use the Glorot
/// uniform bound `√(6 / (fan_in + fan_out))` and its biases start at zero;
/// with the embedding bound the projected scores start in the hundreds and
/// the logistic loss saturates.
pub fn init_model_with_shape(
    kind: ModelKind,
    dim: usize,
    n_entities: usize,
    n_relations: usize,
    conv: ConvShape,
    seed: u64,
) -> Result<ModelParameters, KgeError> {
    let mut params = ModelParameters::zeros(kind, dim, n_entities, n_relations, conv)?;
    let mut rng = rng::seeded(seed);
    let bound = 6.0 / (dim as f64).sqrt();
    match kind {
        ModelKind::ConvE => {
            let k2 = (conv.kernel * conv.kernel) as f64;
            let filter_bound = (6.0 / (k2 + k2 * conv.filters as f64)).sqrt();
            let projection_bound = (6.0 / (conv.features() + dim) as f64).sqrt();
            for (i, table) in params.tables.iter_mut().enumerate() {
                match i {
                    ENT | REL => fill_uniform(table, bound, &mut rng),
                    CONV_FILTERS => fill_uniform(table, filter_bound, &mut rng),
                    CONV_PROJECTION => fill_uniform(table, projection_bound, &mut rng),
                    _ => {}
                }
            }
        }
        _ => {
            for table in &mut params.tables {
                fill_uniform(table, bound, &mut rng);
            }
        }
    }
    if kind == ModelKind::TransE {
        let rel = &mut params.tables[REL];
        for i in 0..rel.rows {
            let row = rel.row_mut(i);
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
    Ok(params)
}
