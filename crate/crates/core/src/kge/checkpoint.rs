//! Binary checkpoint layout:
//!
//! ```text
//! b"MOFKGCK1"                 8-byte magic
//! u32 little-endian           header length in bytes
//! JSON header                 CheckpointHeader
//! f64 little-endian arrays    each table row-major, in header order
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::{ConvShape, ModelParameters};
use super::{KgeError, ModelKind};

const MAGIC: &[u8; 8] = b"MOFKGCK1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableHeader {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub kind: ModelKind,
    pub dim: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub seed: u64,
    pub config_digest: String,
    /// Digest of the entity dictionary the indices refer to.
    pub entity_digest: String,
    /// Relation names in index order.
    #[serde(default)]
    pub relation_names: Vec<String>,
    pub conv: Option<ConvShape>,
    pub tables: Vec<TableHeader>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub params: ModelParameters,
}

impl Checkpoint {
    pub fn new(
        params: ModelParameters,
        seed: u64,
        config_digest: String,
        entity_digest: String,
        relation_names: Vec<String>,
    ) -> Self {
        let header = CheckpointHeader {
            kind: params.kind,
            dim: params.dim,
            n_entities: params.n_entities,
            n_relations: params.n_relations,
            seed,
            config_digest,
            entity_digest,
            relation_names,
            conv: params.conv,
            tables: params
                .tables
                .iter()
                .map(|t| TableHeader {
                    name: t.name.to_owned(),
                    rows: t.rows,
                    cols: t.cols,
                })
                .collect(),
        };
        Checkpoint { header, params }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header).expect("header serializes");
        let mut out = Vec::with_capacity(12 + header.len() + 8 * self.params.param_count());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for t in &self.params.tables {
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, KgeError> {
        let bad = |m: &str| KgeError::Checkpoint(m.to_owned());
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(bad("missing magic bytes"));
        }
        let len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let body = bytes.get(12..12 + len).ok_or_else(|| bad("truncated header"))?;
        let header: CheckpointHeader =
            serde_json::from_slice(body).map_err(|e| KgeError::Checkpoint(format!("header: {e}")))?;
        let mut params = ModelParameters::zeros(
            header.kind,
            header.dim,
            header.n_entities,
            header.n_relations,
            header.conv.unwrap_or_default(),
        )?;
        if params.tables.len() != header.tables.len() {
            return Err(bad("table count does not match the model kind"));
        }
        let mut data = &bytes[12 + len..];
        for (table, th) in params.tables.iter_mut().zip(&header.tables) {
            if (table.rows, table.cols) != (th.rows, th.cols) || table.name != th.name {
                return Err(KgeError::Checkpoint(format!(
                    "table `{}` has unexpected shape",
                    th.name
                )));
            }
            let need = 8 * table.data.len();
            if data.len() < need {
                return Err(bad("truncated parameter data"));
            }
            for (v, chunk) in table.data.iter_mut().zip(data[..need].chunks_exact(8)) {
                *v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            }
            data = &data[need..];
        }
        if !data.is_empty() {
            return Err(bad("trailing bytes after parameter data"));
        }
        Ok(Checkpoint { header, params })
    }
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<(), KgeError> {
    std::fs::write(path, checkpoint.to_bytes())?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, KgeError> {
    Checkpoint::from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kge::init_model;

    #[test]
    fn bit_exact_round_trip() {
        for kind in ModelKind::ALL {
            let params = init_model(kind, 64, 4, 2, 9).unwrap();
            let ck = Checkpoint::new(params, 9, "cfg".into(), "ent".into(), vec!["R".into(), "S".into()]);
            let bytes = ck.to_bytes();
            let back = Checkpoint::from_bytes(&bytes).unwrap();
            assert_eq!(back, ck);
            assert_eq!(back.to_bytes(), bytes);
        }
    }

    #[test]
    fn corrupt_input() {
        let ck = Checkpoint::new(
            init_model(ModelKind::DistMult, 4, 2, 1, 0).unwrap(),
            0,
            "".into(),
            "".into(),
            vec![],
        );
        let bytes = ck.to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(Checkpoint::from_bytes(b"nonsense").is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
    }
}
