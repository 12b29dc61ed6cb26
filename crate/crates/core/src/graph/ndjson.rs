//! Newline-delimited JSON graph export and import.
//!
//! One object per line, all nodes first and then all edges, each in
//! insertion order:
//!
//! ```text
//! {"kind":"node","label":"MOF","key":"ABC","props":{"refcode":"ABC"}}
//! {"kind":"edge","rel":"HAS_SOLVENT","src_key":"MOF:ABC","dst_key":"Solvent:DMF","props":{}}
//! ```
//!
//! Edge endpoints are written as `Label:key` so they stay unambiguous when
//! two labels share a key.

use serde_json::{Map, Value};

use super::schema::GraphSchema;
use super::store::{Properties, PropertyGraph};
use super::value::PropertyValue;
use super::GraphError;

pub fn export_ndjson(graph: &PropertyGraph) -> String {
    let mut out = String::new();
    for n in graph.nodes() {
        out.push_str(&format!(
            "{{\"kind\":\"node\",\"label\":{},\"key\":{},\"props\":{}}}\n",
            json_str(&n.label),
            json_str(&n.key),
            props_json(&n.properties)
        ));
    }
    for e in graph.edges() {
        let src = graph.node(e.source).expect("validated edge");
        let dst = graph.node(e.target).expect("validated edge");
        out.push_str(&format!(
            "{{\"kind\":\"edge\",\"rel\":{},\"src_key\":{},\"dst_key\":{},\"props\":{}}}\n",
            json_str(&e.relation),
            json_str(&src.entity_name()),
            json_str(&dst.entity_name()),
            props_json(&e.properties)
        ));
    }
    out
}

fn json_str(s: &str) -> String {
    Value::String(s.to_owned()).to_string()
}

fn props_json(props: &Properties) -> Value {
    Value::Object(props.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
}

pub fn import_ndjson(text: &str, schema: GraphSchema) -> Result<PropertyGraph, GraphError> {
    let mut graph = PropertyGraph::new(schema);
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| GraphError::Parse { line: line_no, reason };
        let obj: Map<String, Value> = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let text_field = |k: &str| -> Result<&str, GraphError> {
            obj.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| parse_err(format!("missing text field `{k}`")))
        };
        let props = match obj.get("props") {
            None => Properties::new(),
            Some(Value::Object(m)) => m
                .iter()
                .map(|(k, v)| Ok((k.clone(), PropertyValue::from_json(v)?)))
                .collect::<Result<Properties, GraphError>>()
                .map_err(|e| parse_err(e.to_string()))?,
            Some(_) => return Err(parse_err("`props` must be an object".into())),
        };
        match text_field("kind")? {
            "node" => {
                let label = text_field("label")?;
                let key = text_field("key")?;
                let mut props = props;
                let key_prop = graph.schema().key_property(label).to_owned();
                match props.get(&key_prop) {
                    Some(v) if v.to_string() != key => {
                        return Err(parse_err(format!("key `{key}` disagrees with property `{key_prop}`")))
                    }
                    Some(_) => {}
                    None => {
                        props.insert(key_prop, PropertyValue::Text(key.to_owned()));
                    }
                }
                graph.add_node(label, props).map_err(|e| parse_err(e.to_string()))?;
            }
            "edge" => {
                let rel = text_field("rel")?;
                let src = resolve(&graph, text_field("src_key")?).ok_or_else(|| parse_err("unknown src_key".into()))?;
                let dst = resolve(&graph, text_field("dst_key")?).ok_or_else(|| parse_err("unknown dst_key".into()))?;
                graph
                    .add_edge(rel, src, dst, props)
                    .map_err(|e| parse_err(e.to_string()))?;
            }
            other => return Err(parse_err(format!("unknown kind `{other}`"))),
        }
    }
    Ok(graph)
}

fn resolve(graph: &PropertyGraph, entity: &str) -> Option<super::store::NodeId> {
    let (label, key) = entity.split_once(':')?;
    graph.node_by_key(label, key)
}
