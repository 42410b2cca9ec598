use serde_json::{json, Map, Value};

use super::flatten::flatten_with;
use super::{BlankLabeler, RdfTerm};
use crate::engine::{IntermediateNode, PropertyValue};

/// Serializes result trees as expanded JSON-LD. Nested children are inlined
/// as node objects under their predicate. Blank node labels agree with the
/// ones [`super::flatten`] assigns for the same nodes.
pub fn serialize_jsonld(nodes: &[IntermediateNode]) -> String {
    let mut labeler = BlankLabeler::new();
    flatten_with(nodes, &mut labeler);
    let doc: Vec<Value> = nodes.iter().map(|n| node_object(n, &mut labeler)).collect();
    serde_json::to_string_pretty(&Value::Array(doc)).expect("JSON values always serialize")
}

fn node_object(node: &IntermediateNode, labeler: &mut BlankLabeler) -> Value {
    let mut obj = Map::new();
    obj.insert("@id".into(), Value::String(node_id(&node.subject, labeler)));
    if !node.type_iris.is_empty() {
        obj.insert(
            "@type".into(),
            Value::Array(node.type_iris.iter().cloned().map(Value::String).collect()),
        );
    }
    for (predicate, values) in &node.properties {
        let RdfTerm::Iri(key) = predicate else { continue };
        let entry = obj
            .entry(key.clone())
            .or_insert_with(|| Value::Array(Vec::new()));
        let Value::Array(list) = entry else { unreachable!() };
        for value in values {
            list.push(match value {
                PropertyValue::Term(term) => value_object(term, labeler),
                PropertyValue::Node(child) => node_object(child, labeler),
            });
        }
    }
    Value::Object(obj)
}

fn node_id(term: &RdfTerm, labeler: &mut BlankLabeler) -> String {
    match term {
        RdfTerm::BlankNode(key) => format!("_:{}", labeler.label(key)),
        other => other.lexical().to_owned(),
    }
}

fn value_object(term: &RdfTerm, labeler: &mut BlankLabeler) -> Value {
    match term {
        RdfTerm::Literal(lit) => {
            let mut obj = Map::new();
            obj.insert("@value".into(), Value::String(lit.lexical().to_owned()));
            if let Some(lang) = lit.language() {
                obj.insert("@language".into(), Value::String(lang.to_owned()));
            } else if let Some(dt) = lit.datatype() {
                obj.insert("@type".into(), Value::String(dt.to_owned()));
            }
            Value::Object(obj)
        }
        other => json!({ "@id": node_id(other, labeler) }),
    }
}
