//! Structured-source ingestion: CIF crystal files, CSV exports, triple TSV
//! files, and the declarative mapping that loads them into the graph.

mod cif;
mod crystal;
mod mapping;
mod tsv;

pub use cif::{parse_cif, CifBlock, CifDocument, CifLoop, CifSyntaxError};
pub use crystal::{extract_crystal, parse_cif_number, render_crystal, AtomSite, CrystalError, CrystalRecord};
pub use mapping::{
    apply_mapping, default_csd_mapping, EdgeTarget, EndpointRef, ForEach, IngestReport, MappingError, MappingRule,
    MappingSpec, NodeTarget, PropSpec, Skip, Source, Sources, Table,
};
pub use tsv::{load_triples_tsv, write_triples_tsv, FormatError};
