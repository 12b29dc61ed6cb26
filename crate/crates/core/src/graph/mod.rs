//! Labeled property graph for the MOF knowledge graph.
//!
//! Nodes and edges carry a label (relation name for edges) and key-value
//! properties. A [`GraphSchema`] fixes the admissible labels, the relation
//! signatures and the properties each label must carry.

mod ndjson;
mod query;
mod schema;
mod store;
mod triples;
mod value;

use thiserror::Error;

pub use ndjson::{export_ndjson, import_ndjson};
pub use query::{co_solvent_query, CoSolventRecord};
pub use schema::{
    GraphSchema, RelationSignature, SchemaFile, AUTHORED_BY, DESCRIBES, HAS_ATOM, HAS_BOND, HAS_SOLVENT, PUBLISHED_IN,
};
pub use store::{props, Edge, EdgeId, Node, NodeId, Properties, PropertyGraph};
pub use triples::{to_triples, TextTriple, Triple, TripleProjection, Vocab};
pub use value::{PropertyValue, ScalarKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("missing required property `{0}`")]
    MissingRequiredProperty(String),
    #[error("property `{key}` must be {expected}")]
    WrongPropertyKind { key: String, expected: ScalarKind },
    #[error("a {label} node with key `{key}` already exists")]
    DuplicateKey { label: String, key: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` is not declared for {from} -> {to}")]
    SignatureMismatch { relation: String, from: String, to: String },
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(NodeId),
    #[error("edge {relation}({from} -> {to}) already exists")]
    DuplicateEdge { relation: String, from: NodeId, to: NodeId },
    #[error("invalid property value: {0}")]
    InvalidValue(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
