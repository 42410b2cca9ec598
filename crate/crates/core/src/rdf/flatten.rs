use std::collections::HashMap;

use super::{RdfTerm, Triple, TripleSet};
use crate::engine::{IntermediateNode, PropertyValue};
use crate::vocab::rdf;

/// Assigns `b{n}` blank node labels in first-use order.
#[derive(Debug, Default, Clone)]
pub struct BlankLabeler {
    labels: HashMap<String, String>,
}

impl BlankLabeler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn label(&mut self, key: &str) -> String {
        let next = self.labels.len();
        self.labels
            .entry(key.to_owned())
            .or_insert_with(|| format!("b{next}"))
            .clone()
    }

    pub fn relabel(&mut self, term: &RdfTerm) -> RdfTerm {
        match term {
            RdfTerm::BlankNode(key) => RdfTerm::BlankNode(self.label(key)),
            other => other.clone(),
        }
    }
}

/// Flattens nested result trees into triples, depth-first: type triples,
/// then properties in mapping order, where a nested child contributes its
/// link triple immediately followed by its own triples.
pub fn flatten(nodes: &[IntermediateNode]) -> TripleSet {
    let mut labeler = BlankLabeler::new();
    flatten_with(nodes, &mut labeler)
}

pub(crate) fn flatten_with(nodes: &[IntermediateNode], labeler: &mut BlankLabeler) -> TripleSet {
    let mut out = TripleSet::new();
    for node in nodes {
        walk(node, &mut |s, p, o| {
            let s = labeler.relabel(s);
            let o = labeler.relabel(o);
            if let Some(t) = Triple::new(s, p.clone(), o) {
                out.insert(t);
            }
        });
    }
    out
}

pub(crate) fn walk(node: &IntermediateNode, emit: &mut impl FnMut(&RdfTerm, &RdfTerm, &RdfTerm)) {
    let rdf_type = RdfTerm::iri(rdf::TYPE);
    for class in &node.type_iris {
        emit(&node.subject, &rdf_type, &RdfTerm::Iri(class.clone()));
    }
    for (predicate, values) in &node.properties {
        for value in values {
            match value {
                PropertyValue::Term(term) => emit(&node.subject, predicate, term),
                PropertyValue::Node(child) => {
                    emit(&node.subject, predicate, &child.subject);
                    walk(child, emit);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(subject: &str) -> IntermediateNode {
        IntermediateNode::new(RdfTerm::iri(subject))
    }

    #[test]
    fn single_type() {
        let mut n = node("http://e/S");
        n.type_iris.push("http://e/T".into());
        let ts = flatten(&[n]);
        assert_eq!(ts.len(), 1);
        let t = ts.iter().next().unwrap();
        assert_eq!(t.predicate, RdfTerm::iri(rdf::TYPE));
        assert_eq!(t.object, RdfTerm::iri("http://e/T"));
    }

    #[test]
    fn nested_children_link_then_recurse() {
        let mut resort = node("http://e/resort");
        let mut a1 = node("http://e/a1");
        a1.push(RdfTerm::iri("http://e/city"), PropertyValue::Term(RdfTerm::literal("Seefeld")));
        let mut a2 = node("http://e/a2");
        a2.push(RdfTerm::iri("http://e/city"), PropertyValue::Term(RdfTerm::literal("Seefeld")));
        resort.push(RdfTerm::iri("http://e/address"), PropertyValue::Node(a1));
        resort.push(RdfTerm::iri("http://e/address"), PropertyValue::Node(a2));
        let ts = flatten(&[resort]);
        let lines: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            lines,
            [
                "<http://e/resort> <http://e/address> <http://e/a1> .",
                "<http://e/a1> <http://e/city> \"Seefeld\" .",
                "<http://e/resort> <http://e/address> <http://e/a2> .",
                "<http://e/a2> <http://e/city> \"Seefeld\" .",
            ]
        );
    }

    #[test]
    fn duplicate_values_collapse() {
        let mut n = node("http://e/s");
        for _ in 0..3 {
            n.push(RdfTerm::iri("http://e/p"), PropertyValue::Term(RdfTerm::literal("x")));
        }
        n.push(RdfTerm::iri("http://e/p"), PropertyValue::Term(RdfTerm::literal("y")));
        let ts = flatten(&[n.clone(), n]);
        // brute-force set comparison
        let mut distinct: Vec<String> = Vec::new();
        for t in ts.iter() {
            let s = t.to_string();
            assert!(!distinct.contains(&s));
            distinct.push(s);
        }
        assert_eq!(distinct.len(), 2);
    }

    #[test]
    fn blank_labels_follow_first_emission() {
        let mut a = IntermediateNode::new(RdfTerm::blank("Venus"));
        a.push(RdfTerm::iri("http://e/p"), PropertyValue::Term(RdfTerm::blank("Serena")));
        let b = {
            let mut b = IntermediateNode::new(RdfTerm::blank("Serena"));
            b.push(RdfTerm::iri("http://e/p"), PropertyValue::Term(RdfTerm::literal("x")));
            b
        };
        let ts = flatten(&[a, b]);
        let lines: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(lines, ["_:b0 <http://e/p> _:b1 .", "_:b1 <http://e/p> \"x\" ."]);
    }
}
