use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::schema::GraphSchema;
use super::value::PropertyValue;
use super::GraphError;

pub type Properties = BTreeMap<String, PropertyValue>;

/// Opaque node handle, assigned in insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    /// Text value of the label's key property.
    pub key: String,
    pub properties: Properties,
}

impl Node {
    /// Graph-wide entity name, `Label:key`.
    pub fn entity_name(&self) -> String {
        format!("{}:{}", self.label, self.key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub relation: String,
    pub source: NodeId,
    pub target: NodeId,
    pub properties: Properties,
}

/// In-memory labeled property graph validated against a [`GraphSchema`].
///
/// Single writer; once built it can be shared for concurrent reads.
#[derive(Debug, Clone)]
pub struct PropertyGraph {
    schema: GraphSchema,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    by_key: HashMap<(String, String), NodeId>,
    edge_set: HashSet<(String, NodeId, NodeId)>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
}

impl PropertyGraph {
    pub fn new(schema: GraphSchema) -> Self {
        PropertyGraph {
            schema,
            nodes: Vec::new(),
            edges: Vec::new(),
            by_key: HashMap::new(),
            edge_set: HashSet::new(),
            outgoing: Vec::new(),
            incoming: Vec::new(),
        }
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn add_node(&mut self, label: &str, properties: Properties) -> Result<NodeId, GraphError> {
        if !self.schema.has_label(label) {
            return Err(GraphError::UnknownLabel(label.to_owned()));
        }
        for (key, kind) in self.schema.required_props(label) {
            let value = properties
                .get(key)
                .ok_or_else(|| GraphError::MissingRequiredProperty(key.clone()))?;
            if value.kind() != *kind {
                return Err(GraphError::WrongPropertyKind {
                    key: key.clone(),
                    expected: *kind,
                });
            }
        }
        for v in properties.values() {
            v.validate()?;
        }
        let key_prop = self.schema.key_property(label);
        let key = properties
            .get(key_prop)
            .map(|v| v.to_string())
            .ok_or_else(|| GraphError::MissingRequiredProperty(key_prop.to_owned()))?;
        if key.is_empty() {
            return Err(GraphError::MissingRequiredProperty(key_prop.to_owned()));
        }
        let index = (label.to_owned(), key.clone());
        if self.by_key.contains_key(&index) {
            return Err(GraphError::DuplicateKey {
                label: label.to_owned(),
                key,
            });
        }
        let id = NodeId(self.nodes.len() as u32);
        self.by_key.insert(index, id);
        self.nodes.push(Node {
            id,
            label: label.to_owned(),
            key,
            properties,
        });
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        relation: &str,
        source: NodeId,
        target: NodeId,
        properties: Properties,
    ) -> Result<EdgeId, GraphError> {
        if !self.schema.has_relation(relation) {
            return Err(GraphError::UnknownRelation(relation.to_owned()));
        }
        let (src, dst) = match (self.node(source), self.node(target)) {
            (Some(s), Some(t)) => (s, t),
            (None, _) => return Err(GraphError::DanglingEndpoint(source)),
            (_, None) => return Err(GraphError::DanglingEndpoint(target)),
        };
        if !self.schema.allows(relation, &src.label, &dst.label) {
            return Err(GraphError::SignatureMismatch {
                relation: relation.to_owned(),
                from: src.label.clone(),
                to: dst.label.clone(),
            });
        }
        for v in properties.values() {
            v.validate()?;
        }
        let triple = (relation.to_owned(), source, target);
        if self.edge_set.contains(&triple) {
            return Err(GraphError::DuplicateEdge {
                relation: relation.to_owned(),
                from: source,
                to: target,
            });
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edge_set.insert(triple);
        self.edges.push(Edge {
            id,
            relation: relation.to_owned(),
            source,
            target,
            properties,
        });
        self.outgoing[source.0 as usize].push(id);
        self.incoming[target.0 as usize].push(id);
        Ok(id)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0 as usize)
    }

    pub fn node_by_key(&self, label: &str, key: &str) -> Option<NodeId> {
        self.by_key.get(&(label.to_owned(), key.to_owned())).copied()
    }

    pub fn has_edge(&self, relation: &str, source: NodeId, target: NodeId) -> bool {
        self.edge_set.contains(&(relation.to_owned(), source, target))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes_with_label<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Node> + 'a {
        self.nodes.iter().filter(move |n| n.label == label)
    }

    /// Targets of outgoing `relation` edges from `node`, in insertion order.
    pub fn out_neighbors<'a>(&'a self, node: NodeId, relation: &'a str) -> impl Iterator<Item = NodeId> + 'a {
        self.outgoing
            .get(node.0 as usize)
            .into_iter()
            .flatten()
            .map(|e| &self.edges[e.0 as usize])
            .filter(move |e| e.relation == relation)
            .map(|e| e.target)
    }

    /// Sources of incoming `relation` edges into `node`, in insertion order.
    pub fn in_neighbors<'a>(&'a self, node: NodeId, relation: &'a str) -> impl Iterator<Item = NodeId> + 'a {
        self.incoming
            .get(node.0 as usize)
            .into_iter()
            .flatten()
            .map(|e| &self.edges[e.0 as usize])
            .filter(move |e| e.relation == relation)
            .map(|e| e.source)
    }

    /// Re-checks every node and edge against the schema.
    pub fn validate(&self) -> Result<(), GraphError> {
        for n in &self.nodes {
            if !self.schema.has_label(&n.label) {
                return Err(GraphError::UnknownLabel(n.label.clone()));
            }
            for (key, _) in self.schema.required_props(&n.label) {
                if !n.properties.contains_key(key) {
                    return Err(GraphError::MissingRequiredProperty(key.clone()));
                }
            }
        }
        for e in &self.edges {
            let src = self.node(e.source).ok_or(GraphError::DanglingEndpoint(e.source))?;
            let dst = self.node(e.target).ok_or(GraphError::DanglingEndpoint(e.target))?;
            if !self.schema.allows(&e.relation, &src.label, &dst.label) {
                return Err(GraphError::SignatureMismatch {
                    relation: e.relation.clone(),
                    from: src.label.clone(),
                    to: dst.label.clone(),
                });
            }
        }
        Ok(())
    }

    /// Copies the nodes accepted by `keep` and every edge between them.
    /// Insertion order is preserved.
    pub fn induced_subgraph(&self, keep: impl Fn(&Node) -> bool) -> PropertyGraph {
        let mut sub = PropertyGraph::new(self.schema.clone());
        let mut remap = vec![None; self.nodes.len()];
        for n in &self.nodes {
            if keep(n) {
                let id = sub
                    .add_node(&n.label, n.properties.clone())
                    .expect("node already validated");
                remap[n.id.0 as usize] = Some(id);
            }
        }
        for e in &self.edges {
            if let (Some(s), Some(t)) = (remap[e.source.0 as usize], remap[e.target.0 as usize]) {
                sub.add_edge(&e.relation, s, t, e.properties.clone())
                    .expect("edge already validated");
            }
        }
        sub
    }

    /// Copies every node and the edges accepted by `keep`, preserving ids.
    pub fn filter_edges(&self, keep: impl Fn(&Edge) -> bool) -> PropertyGraph {
        let mut out = PropertyGraph::new(self.schema.clone());
        for n in &self.nodes {
            out.add_node(&n.label, n.properties.clone())
                .expect("node already validated");
        }
        for e in self.edges.iter().filter(|e| keep(e)) {
            out.add_edge(&e.relation, e.source, e.target, e.properties.clone())
                .expect("edge already validated");
        }
        out
    }
}

/// Builds a property map from `(key, value)` pairs.
pub fn props<I, K, V>(pairs: I) -> Properties
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<PropertyValue>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}
