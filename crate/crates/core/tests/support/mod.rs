//! Generators and oracles shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

use std::sync::Arc;

use oxrdf::{BlankNode, Graph, Literal, NamedNode, NamedOrBlankNode, Term, Triple};
use rand::{Rng, RngExt};
use rml_engine::rdf::RdfTerm;
use rml_engine::source::{compute_relative_iterator, evaluate_path};
use rml_engine::engine::execute;
use rml_engine::source::parse_source;
use rml_engine::{parse_mapping_document, ExecutionOutput, MappingJob, PathExpression, SourceDocument, SourceFormat, TripleSet};
use serde_json::{json, Map, Value};

const KEYS: [&str; 3] = ["a", "b", "c"];

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

pub fn random_json(rng: &mut impl Rng, depth: u32) -> Value {
    let kind = if depth == 0 { 0 } else { rng.random_range(0..4) };
    match kind {
        0 => match rng.random_range(0..3) {
            0 => json!(rng.random_range(0..100)),
            1 => json!(format!("v{}", rng.random_range(0..100))),
            _ => Value::Null,
        },
        1 | 2 => {
            let mut obj = Map::new();
            for key in KEYS {
                if rng.random_bool(0.75) {
                    obj.insert(key.to_owned(), random_json(rng, depth - 1));
                }
            }
            Value::Object(obj)
        }
        _ => Value::Array((0..rng.random_range(0..4)).map(|_| random_json(rng, depth - 1)).collect()),
    }
}

const JSON_STEPS: [&str; 8] = [".a", ".b", ".c", ".*", "[*]", "[0]", "[1]", "['a']"];

/// A random absolute JSONPath and an extension of it.
pub fn random_json_paths(rng: &mut impl Rng) -> (String, String) {
    let mut parent = String::from("$");
    for _ in 0..rng.random_range(0..4) {
        parent.push_str(pick(rng, &JSON_STEPS));
    }
    let mut child = parent.clone();
    for _ in 0..rng.random_range(0..4) {
        child.push_str(pick(rng, &JSON_STEPS));
    }
    (parent, child)
}

pub fn random_xml(rng: &mut impl Rng, depth: u32) -> String {
    let mut out = String::from("<r>");
    for _ in 0..rng.random_range(1..4) {
        xml_element(rng, depth, &mut out);
    }
    out.push_str("</r>");
    out
}

fn xml_element(rng: &mut impl Rng, depth: u32, out: &mut String) {
    let name = pick(rng, &KEYS);
    out.push('<');
    out.push_str(name);
    if rng.random_bool(0.5) {
        out.push_str(&format!(" id=\"{}\"", rng.random_range(0..100)));
    }
    out.push('>');
    if rng.random_bool(0.4) {
        out.push_str(&format!("t{}", rng.random_range(0..100)));
    }
    if depth > 0 {
        for _ in 0..rng.random_range(0..4) {
            xml_element(rng, depth - 1, out);
        }
    }
    out.push_str("</");
    out.push_str(name);
    out.push('>');
}

const XML_STEPS: [&str; 7] = ["a", "b", "c", "*", "a[1]", "*[2]", "b[2]"];

/// A random absolute XPath below the `<r>` root and an extension of it that
/// may end in an attribute or text step.
pub fn random_xpaths(rng: &mut impl Rng) -> (String, String) {
    let mut parent = String::from("/r");
    for _ in 0..rng.random_range(0..3) {
        parent.push('/');
        parent.push_str(pick(rng, &XML_STEPS));
    }
    let mut child = parent.clone();
    for _ in 0..rng.random_range(0..4) {
        child.push('/');
        child.push_str(pick(rng, &XML_STEPS));
    }
    match rng.random_range(0..4) {
        0 => child.push_str("/@id"),
        1 => child.push_str("/text()"),
        _ => {}
    }
    (parent, child)
}

/// Checks that evaluating the relative iterator under every parent node
/// selects exactly the nodes the absolute child iterator selects.
pub fn check_partition(doc: &SourceDocument, parent: &str, child: &str) -> Result<(), String> {
    let formulation = doc.format().formulation();
    let p = PathExpression::parse(formulation, parent).map_err(|e| e.to_string())?;
    let c = PathExpression::parse(formulation, child).map_err(|e| e.to_string())?;
    let rel = compute_relative_iterator(&p, &c).map_err(|e| e.to_string())?;
    if !rel.is_current() {
        let reparsed = PathExpression::parse_relative(formulation, rel.text()).map_err(|e| e.to_string())?;
        if reparsed != rel {
            return Err(format!("relative text `{}` does not reparse to the same steps", rel.text()));
        }
    }
    let mut expected: Vec<usize> = evaluate_path(doc.root(), &c)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|n| n.document_order_index())
        .collect();
    let mut partitioned = Vec::new();
    for n in evaluate_path(doc.root(), &p).map_err(|e| e.to_string())? {
        for m in evaluate_path(n, &rel).map_err(|e| e.to_string())? {
            partitioned.push(m.document_order_index());
        }
    }
    expected.sort_unstable();
    partitioned.sort_unstable();
    if expected != partitioned {
        return Err(format!(
            "{parent} / {child} (relative `{}`): absolute {expected:?}, partitioned {partitioned:?}",
            rel.text()
        ));
    }
    Ok(())
}

pub const EX: &str = "http://example.com/";

/// Maps `source_text` (registered under `declared`) and returns the output.
pub fn run_mapping(
    mapping: &str,
    declared: &str,
    source_text: &str,
    format: SourceFormat,
) -> Result<ExecutionOutput, String> {
    let doc = parse_mapping_document(mapping).map_err(|e| e.to_string())?;
    let source = parse_source(source_text.as_bytes(), format, declared).map_err(|e| e.to_string())?;
    let job = MappingJob::new(doc).with_source_document(declared, Arc::new(source));
    execute(&job).map_err(|e| e.to_string())
}

#[derive(Debug, Clone)]
pub struct Resort {
    pub id: u32,
    pub name: Option<String>,
    pub details: Vec<Detail>,
    /// Emit no `contactDetails` member at all when there are no details.
    pub omit_empty_details: bool,
}

#[derive(Debug, Clone)]
pub enum Detail {
    Phone(String),
    Address { id: Option<String>, street: Option<String> },
}

const NAMES: [&str; 6] = [
    "Gschwandtkopflifte",
    "Rosshütte",
    "Seefeld \"Nord\"",
    "A & B <Lifte>",
    "Tab\there",
    "Zugspitz Arena",
];

pub fn random_resorts(rng: &mut impl Rng) -> Vec<Resort> {
    (0..rng.random_range(1..6))
        .map(|i| {
            let details = (0..rng.random_range(0..4))
                .map(|k| match rng.random_range(0..6) {
                    0 => Detail::Phone(format!("+43 {i}{k}")),
                    1 => Detail::Address {
                        id: None,
                        street: Some(format!("Nowhere {k}")),
                    },
                    _ => Detail::Address {
                        id: Some(format!("{i}-{k}")),
                        street: rng
                            .random_bool(0.8)
                            .then(|| format!("{} {}", pick(rng, &NAMES), rng.random_range(1..999))),
                    },
                })
                .collect();
            Resort {
                id: i,
                name: rng.random_bool(0.8).then(|| pick(rng, &NAMES).to_owned()),
                details,
                omit_empty_details: rng.random_bool(0.5),
            }
        })
        .collect()
}

/// Two resorts with two distinct addresses each.
pub fn two_resorts() -> Vec<Resort> {
    let address = |id: &str, street: &str| Detail::Address {
        id: Some(id.to_owned()),
        street: Some(street.to_owned()),
    };
    vec![
        Resort {
            id: 1,
            name: Some("Gschwandtkopflifte".into()),
            details: vec![address("1-0", "Gschwandtkopf 700"), address("1-1", "Gschwandtkopf 702")],
            omit_empty_details: false,
        },
        Resort {
            id: 2,
            name: Some("Rosshütte".into()),
            details: vec![address("2-0", "Seefelder Joch 1"), address("2-1", "Härmelekopf 3")],
            omit_empty_details: false,
        },
    ]
}

pub fn resorts_json(resorts: &[Resort]) -> String {
    let items: Vec<Value> = resorts
        .iter()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert("id".into(), json!(r.id));
            if let Some(name) = &r.name {
                obj.insert("name".into(), json!(name));
            }
            if !(r.details.is_empty() && r.omit_empty_details) {
                let details: Vec<Value> = r
                    .details
                    .iter()
                    .map(|d| match d {
                        Detail::Phone(p) => json!({ "phone": p }),
                        Detail::Address { id, street } => {
                            let mut a = Map::new();
                            if let Some(id) = id {
                                a.insert("id".into(), json!(id));
                            }
                            if let Some(s) = street {
                                a.insert("street".into(), json!(s));
                            }
                            json!({ "address": a })
                        }
                    })
                    .collect();
                obj.insert("contactDetails".into(), Value::Array(details));
            }
            Value::Object(obj)
        })
        .collect();
    serde_json::to_string_pretty(&items).unwrap()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn resorts_xml(resorts: &[Resort]) -> String {
    let mut out = String::from("<resorts>");
    for r in resorts {
        out.push_str(&format!("<resort><id>{}</id>", r.id));
        if let Some(name) = &r.name {
            out.push_str(&format!("<name>{}</name>", xml_escape(name)));
        }
        if !(r.details.is_empty() && r.omit_empty_details) {
            out.push_str("<contactDetails>");
            for d in &r.details {
                out.push_str("<contactDetail>");
                match d {
                    Detail::Phone(p) => out.push_str(&format!("<phone>{}</phone>", xml_escape(p))),
                    Detail::Address { id, street } => {
                        out.push_str("<address>");
                        if let Some(id) = id {
                            out.push_str(&format!("<id>{}</id>", xml_escape(id)));
                        }
                        if let Some(s) = street {
                            out.push_str(&format!("<street>{}</street>", xml_escape(s)));
                        }
                        out.push_str("</address>");
                    }
                }
                out.push_str("</contactDetail>");
            }
            out.push_str("</contactDetails>");
        }
        out.push_str("</resort>");
    }
    out.push_str("</resorts>");
    out
}

/// Resorts link to their addresses through a parent triples map without join
/// conditions; the address iterator is nested below the resort iterator.
pub fn resorts_mapping(xml: bool, source: &str) -> String {
    let (formulation, resort_it, address_it) = if xml {
        ("ql:XPath", "/resorts/resort", "/resorts/resort/contactDetails/contactDetail/address")
    } else {
        ("ql:JSONPath", "$.*", "$.*.contactDetails.*.address")
    };
    format!(
        r#"@prefix rr: <http://www.w3.org/ns/r2rml#> .
@prefix rml: <http://semweb.mmlab.be/ns/rml#> .
@prefix ql: <http://semweb.mmlab.be/ns/ql#> .
@prefix ex: <{EX}> .
@base <{EX}mapping/> .

<#Resort> rml:logicalSource [ rml:source "{source}"; rml:referenceFormulation {formulation}; rml:iterator "{resort_it}" ];
  rr:subjectMap [ rr:template "{EX}resort/{{id}}" ];
  rr:predicateObjectMap [ rr:predicate ex:name; rr:objectMap [ rml:reference "name" ] ],
    [ rr:predicate ex:address; rr:objectMap [ rr:parentTriplesMap <#Address> ] ] .

<#Address> rml:logicalSource [ rml:source "{source}"; rml:referenceFormulation {formulation}; rml:iterator "{address_it}" ];
  rr:subjectMap [ rr:template "{EX}address/{{id}}" ];
  rr:predicateObjectMap [ rr:predicate ex:street; rr:objectMap [ rml:reference "street" ] ] .
"#
    )
}

/// The graph a correct nested mapping yields, read off the model directly.
pub fn resorts_oracle(resorts: &[Resort]) -> Graph {
    let iri = |s: String| NamedNode::new(s).unwrap();
    let mut g = Graph::new();
    for r in resorts {
        let subject = iri(format!("{EX}resort/{}", r.id));
        if let Some(name) = &r.name {
            g.insert(&Triple::new(subject.clone(), iri(format!("{EX}name")), Literal::new_simple_literal(name)));
        }
        for d in &r.details {
            if let Detail::Address { id: Some(id), street } = d {
                let address = iri(format!("{EX}address/{id}"));
                g.insert(&Triple::new(subject.clone(), iri(format!("{EX}address")), address.clone()));
                if let Some(s) = street {
                    g.insert(&Triple::new(address, iri(format!("{EX}street")), Literal::new_simple_literal(s)));
                }
            }
        }
    }
    g
}

pub fn to_graph(triples: &TripleSet) -> Graph {
    let mut g = Graph::new();
    for t in triples.iter() {
        let subject: NamedOrBlankNode = match to_term(&t.subject) {
            Term::NamedNode(n) => n.into(),
            Term::BlankNode(b) => b.into(),
            other => panic!("literal subject {other}"),
        };
        let Term::NamedNode(predicate) = to_term(&t.predicate) else {
            panic!("non-IRI predicate")
        };
        g.insert(&Triple::new(subject, predicate, to_term(&t.object)));
    }
    g
}

fn to_term(term: &RdfTerm) -> Term {
    match term {
        RdfTerm::Iri(v) => NamedNode::new(v.clone()).expect("valid IRI").into(),
        RdfTerm::BlankNode(b) => BlankNode::new(b.clone()).expect("valid blank label").into(),
        RdfTerm::Literal(l) => match (l.language(), l.datatype()) {
            (Some(lang), _) => Literal::new_language_tagged_literal(l.lexical(), lang).unwrap().into(),
            (None, Some(dt)) => Literal::new_typed_literal(l.lexical(), NamedNode::new(dt).unwrap()).into(),
            (None, None) => Literal::new_simple_literal(l.lexical()).into(),
        },
    }
}

pub fn parse_ntriples(bytes: &[u8]) -> Result<Graph, String> {
    let mut g = Graph::new();
    for t in oxttl::NTriplesParser::new().for_slice(bytes) {
        g.insert(&t.map_err(|e| e.to_string())?);
    }
    Ok(g)
}

/// Reads expanded JSON-LD node objects (with nested node objects under
/// properties) into a graph.
pub fn expand_jsonld(doc: &Value) -> Result<Graph, String> {
    let mut g = Graph::new();
    let nodes = doc.as_array().ok_or("top level is not an array")?;
    for n in nodes {
        jsonld_node(n, &mut g)?;
    }
    Ok(g)
}

fn jsonld_id(id: &str) -> Result<NamedOrBlankNode, String> {
    match id.strip_prefix("_:") {
        Some(label) => Ok(BlankNode::new(label).map_err(|e| e.to_string())?.into()),
        None => Ok(NamedNode::new(id).map_err(|e| e.to_string())?.into()),
    }
}

fn jsonld_node(node: &Value, g: &mut Graph) -> Result<NamedOrBlankNode, String> {
    let obj = node.as_object().ok_or("node is not an object")?;
    let subject = jsonld_id(obj.get("@id").and_then(Value::as_str).ok_or("node without @id")?)?;
    let rdf_type = NamedNode::new_unchecked("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
    for (key, value) in obj {
        match key.as_str() {
            "@id" => {}
            "@type" => {
                for t in value.as_array().ok_or("@type is not an array")? {
                    let t = NamedNode::new(t.as_str().ok_or("@type entry")?).map_err(|e| e.to_string())?;
                    g.insert(&Triple::new(subject.clone(), rdf_type.clone(), t));
                }
            }
            property => {
                let predicate = NamedNode::new(property).map_err(|e| e.to_string())?;
                for v in value.as_array().ok_or("property value is not an array")? {
                    let object: Term = if let Some(lexical) = v.get("@value") {
                        let lexical = lexical.as_str().ok_or("@value is not a string")?;
                        match (v.get("@language"), v.get("@type")) {
                            (Some(lang), _) => Literal::new_language_tagged_literal(lexical, lang.as_str().unwrap_or(""))
                                .map_err(|e| e.to_string())?
                                .into(),
                            (None, Some(dt)) => Literal::new_typed_literal(
                                lexical,
                                NamedNode::new(dt.as_str().unwrap_or("")).map_err(|e| e.to_string())?,
                            )
                            .into(),
                            (None, None) => Literal::new_simple_literal(lexical).into(),
                        }
                    } else if v.as_object().is_some_and(|o| o.len() == 1) {
                        match jsonld_id(v["@id"].as_str().ok_or("reference without @id")?)? {
                            NamedOrBlankNode::NamedNode(n) => n.into(),
                            NamedOrBlankNode::BlankNode(b) => b.into(),
                        }
                    } else {
                        match jsonld_node(v, g)? {
                            NamedOrBlankNode::NamedNode(n) => n.into(),
                            NamedOrBlankNode::BlankNode(b) => b.into(),
                        }
                    };
                    g.insert(&Triple::new(subject.clone(), predicate.clone(), object));
                }
            }
        }
    }
    Ok(subject)
}

pub fn canonical(mut g: Graph) -> Graph {
    g.canonicalize(oxrdf::dataset::CanonicalizationAlgorithm::Unstable);
    g
}
