use std::collections::BTreeSet;

use super::solvents::SolventMention;
use super::ExtractError;
use crate::graph::{props, PropertyGraph, HAS_SOLVENT};
use crate::ingest::IngestReport;

/// Provenance tag stored on edges created from text.
pub const TEXT_SOURCE: &str = "text-extraction";

/// Adds the extracted solvents of one MOF to the graph: one `Solvent` node per
/// canonical name and one `HAS_SOLVENT` edge tagged `source = "text-extraction"`.
/// Existing nodes and edges are reused, so repeated calls add nothing.
pub fn to_graph_fragments(
    mof_key: &str,
    mentions: &[SolventMention],
    graph: &mut PropertyGraph,
) -> Result<IngestReport, ExtractError> {
    let mof = graph
        .node_by_key("MOF", mof_key)
        .ok_or_else(|| ExtractError::UnknownMof(mof_key.to_owned()))?;
    let mut report = IngestReport::default();
    let canonicals: BTreeSet<&str> = mentions.iter().map(|m| m.canonical.as_str()).collect();
    for name in canonicals {
        let solvent = match graph.node_by_key("Solvent", name) {
            Some(id) => id,
            None => {
                report.nodes_created += 1;
                graph.add_node("Solvent", props([("name", name)]))?
            }
        };
        if !graph.has_edge(HAS_SOLVENT, mof, solvent) {
            graph.add_edge(HAS_SOLVENT, mof, solvent, props([("source", TEXT_SOURCE)]))?;
            report.edges_created += 1;
        }
    }
    Ok(report)
}
