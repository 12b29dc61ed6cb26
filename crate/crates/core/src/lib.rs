//! Toolkit for building a metal-organic framework knowledge graph, training
//! knowledge-graph embeddings on it and predicting missing solvent links.
//!
//! - [`graph`]: labeled property graph, schema, co-solvent query, triple projection
//! - [`ingest`]: CIF and CSV parsing plus declarative mapping into the graph
//! - [`extract`]: rule-based synthesis-step and solvent extraction from text
//! - [`kge`]: TransE, DistMult, ComplEx, SimplE and ConvE with SGD training
//! - [`eval`]: filtered rank evaluation (MRR, Hits@K, AMRI)
//! - [`bench`]: planted-signal synthetic graphs and the end-to-end experiment

pub mod bench;
pub mod eval;
pub mod extract;
pub mod graph;
pub mod ingest;
pub mod kge;
pub mod rng;
