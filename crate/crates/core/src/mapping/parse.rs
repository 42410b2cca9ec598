//! Turtle mapping documents to [`MappingDocument`].

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use oxrdf::{NamedOrBlankNode, Term};
use oxttl::TurtleParser;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{
    FunctionCall, GraphMap, JoinCondition, LogicalSource, MappingDocument, PredicateObjectMap,
    Reference, SubjectMap, Template, TermMap, TermType, TermValue, TriplesMap, TriplesMapId,
};
use crate::rdf::{Literal, RdfTerm};
use crate::source::{Formulation, PathExpression};
use crate::vocab::{fnml, fno, ql, rdf, rml, rr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    /// Line and column are 1-based.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: u64, column: u64, message: String },
    #[error("{subject}: {message}")]
    Model { subject: String, message: String },
}

/// Parses an RML mapping document written in Turtle.
///
/// Triples maps are the subjects carrying `rml:logicalSource`,
/// `rr:subjectMap` or `a rr:TriplesMap`, kept in order of first appearance.
pub fn parse_mapping_document(text: &str) -> Result<MappingDocument, MappingError> {
    let text = escape_stray_backslashes(text);
    let mut parser = TurtleParser::new().for_slice(text.as_bytes());
    let mut graph = Graph::default();
    for triple in parser.by_ref() {
        let triple = triple.map_err(|e| {
            let start = e.location().start;
            MappingError::Syntax {
                line: start.line + 1,
                column: start.column + 1,
                message: e.message().to_owned(),
            }
        })?;
        graph.insert(triple.subject, triple.predicate.into_string(), triple.object);
    }
    let prefixes: BTreeMap<String, String> = parser
        .prefixes()
        .map(|(p, iri)| (p.to_owned(), iri.to_owned()))
        .collect();
    let base_iri = parser.base_iri().map(str::to_owned);

    // function values may carry their own logical source but are not triples maps
    let function_values: Vec<NamedOrBlankNode> = graph
        .by_subject
        .values()
        .flatten()
        .filter(|(p, _)| p == fnml::FUNCTION_VALUE)
        .filter_map(|(_, o)| as_node(o))
        .collect();
    let mut triples_maps = Vec::new();
    for subject in &graph.order {
        if function_values.contains(subject) {
            continue;
        }
        let is_map = graph.has(subject, rml::LOGICAL_SOURCE)
            || graph.has(subject, rr::LOGICAL_TABLE)
            || graph.has(subject, rr::SUBJECT_MAP)
            || graph
                .objects(subject, rdf::TYPE)
                .any(|t| matches!(t, Term::NamedNode(n) if n.as_str() == rr::TRIPLES_MAP));
        if is_map {
            triples_maps.push(graph.triples_map(subject)?);
        }
    }

    let digest = Sha256::digest(text.as_bytes());
    let source_text_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(MappingDocument {
        triples_maps,
        prefixes,
        base_iri,
        source_text_hash,
    })
}

fn node_name(node: &NamedOrBlankNode) -> String {
    match node {
        NamedOrBlankNode::NamedNode(n) => n.as_str().to_owned(),
        NamedOrBlankNode::BlankNode(b) => format!("_:{}", b.as_str()),
    }
}

fn as_node(term: &Term) -> Option<NamedOrBlankNode> {
    match term {
        Term::NamedNode(n) => Some(n.clone().into()),
        Term::BlankNode(b) => Some(b.clone().into()),
        _ => None,
    }
}

/// Turtle only allows `\t \b \n \r \f \" \' \\` and `\u` escapes in strings.
/// Mappings commonly write template escapes such as `\{` directly; those
/// backslashes are kept as literal characters.
fn escape_stray_backslashes(text: &str) -> Cow<'_, str> {
    let bytes = text.as_bytes();
    let mut fixes = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'<' => {
                while i < bytes.len() && bytes[i] != b'>' {
                    i += 1;
                }
                i += 1;
            }
            q @ (b'"' | b'\'') => {
                let long = bytes[i..].starts_with(&[q, q, q]);
                i += if long { 3 } else { 1 };
                while i < bytes.len() {
                    if bytes[i] == b'\\' {
                        let next = bytes.get(i + 1).copied().unwrap_or(b' ');
                        if !matches!(next, b't' | b'b' | b'n' | b'r' | b'f' | b'"' | b'\'' | b'\\' | b'u' | b'U') {
                            fixes.push(i);
                        }
                        i += 2;
                    } else if long && bytes[i..].starts_with(&[q, q, q]) {
                        i += 3;
                        break;
                    } else if !long && (bytes[i] == q || bytes[i] == b'\n') {
                        i += 1;
                        break;
                    } else {
                        i += 1;
                    }
                }
            }
            _ => i += 1,
        }
    }
    if fixes.is_empty() {
        return Cow::Borrowed(text);
    }
    let mut out = String::with_capacity(text.len() + fixes.len());
    let mut last = 0;
    for at in fixes {
        out.push_str(&text[last..at]);
        out.push('\\');
        last = at;
    }
    out.push_str(&text[last..]);
    Cow::Owned(out)
}

fn to_rdf_term(term: &Term) -> Option<RdfTerm> {
    match term {
        Term::NamedNode(n) => Some(RdfTerm::Iri(n.as_str().to_owned())),
        Term::BlankNode(b) => Some(RdfTerm::BlankNode(b.as_str().to_owned())),
        Term::Literal(l) => Some(RdfTerm::Literal(match l.language() {
            Some(lang) => Literal::with_language(l.value(), lang),
            None => Literal::typed(l.value(), l.datatype().as_str()),
        })),
        #[allow(unreachable_patterns)]
        _ => None,
    }
}

#[derive(Default)]
struct Graph {
    by_subject: HashMap<NamedOrBlankNode, Vec<(String, Term)>>,
    order: Vec<NamedOrBlankNode>,
}

impl Graph {
    fn insert(&mut self, subject: NamedOrBlankNode, predicate: String, object: Term) {
        let entry = self.by_subject.entry(subject.clone()).or_insert_with(|| {
            self.order.push(subject);
            Vec::new()
        });
        entry.push((predicate, object));
    }

    fn objects<'a: 'p, 'p>(&'a self, s: &NamedOrBlankNode, p: &'p str) -> impl Iterator<Item = &'a Term> + 'p {
        self.by_subject
            .get(s)
            .into_iter()
            .flatten()
            .filter(move |(pred, _)| pred == p)
            .map(|(_, o)| o)
    }

    fn has(&self, s: &NamedOrBlankNode, p: &str) -> bool {
        self.objects(s, p).next().is_some()
    }

    fn at_most_one(&self, s: &NamedOrBlankNode, p: &str) -> Result<Option<&Term>, MappingError> {
        let mut it = self.objects(s, p);
        let first = it.next();
        if it.next().is_some() {
            return Err(model(s, format!("more than one <{p}>")));
        }
        Ok(first)
    }

    fn node_objects(&self, s: &NamedOrBlankNode, p: &str) -> Result<Vec<NamedOrBlankNode>, MappingError> {
        self.objects(s, p)
            .map(|o| as_node(o).ok_or_else(|| model(s, format!("<{p}> must point to a resource"))))
            .collect()
    }

    fn string(&self, s: &NamedOrBlankNode, p: &str) -> Result<Option<String>, MappingError> {
        match self.at_most_one(s, p)? {
            None => Ok(None),
            Some(Term::Literal(l)) => Ok(Some(l.value().to_owned())),
            Some(_) => Err(model(s, format!("<{p}> must be a literal"))),
        }
    }

    fn iri(&self, s: &NamedOrBlankNode, p: &str) -> Result<Option<String>, MappingError> {
        match self.at_most_one(s, p)? {
            None => Ok(None),
            Some(Term::NamedNode(n)) => Ok(Some(n.as_str().to_owned())),
            Some(_) => Err(model(s, format!("<{p}> must be an IRI"))),
        }
    }

    fn triples_map(&self, s: &NamedOrBlankNode) -> Result<TriplesMap, MappingError> {
        if self.has(s, rr::LOGICAL_TABLE) {
            return Err(model(s, "rr:logicalTable is not supported; use rml:logicalSource"));
        }
        let ls = match self.node_objects(s, rml::LOGICAL_SOURCE)?.as_slice() {
            [ls] => ls.clone(),
            [] => return Err(model(s, "missing rml:logicalSource")),
            _ => return Err(model(s, "more than one rml:logicalSource")),
        };
        let logical_source = self.logical_source(&ls)?;
        let formulation = logical_source.reference_formulation;

        let subject_maps = self.node_objects(s, rr::SUBJECT_MAP)?;
        let shortcut = self.at_most_one(s, rr::SUBJECT)?;
        let subject_map = match (subject_maps.as_slice(), shortcut) {
            ([sm], None) => SubjectMap {
                term_map: self.term_map(sm, formulation)?,
                classes: self
                    .objects(sm, rr::CLASS)
                    .map(|c| match c {
                        Term::NamedNode(n) => Ok(n.as_str().to_owned()),
                        _ => Err(model(sm, "rr:class must be an IRI")),
                    })
                    .collect::<Result<_, _>>()?,
                graph_maps: self.graph_maps(sm)?,
            },
            ([], Some(constant)) => SubjectMap {
                term_map: self.constant(s, constant)?,
                classes: Vec::new(),
                graph_maps: Vec::new(),
            },
            ([], None) => return Err(model(s, "missing rr:subjectMap")),
            _ => return Err(model(s, "a triples map has exactly one subject map")),
        };

        let mut predicate_object_maps = Vec::new();
        for pom in self.node_objects(s, rr::PREDICATE_OBJECT_MAP)? {
            predicate_object_maps.push(self.predicate_object_map(&pom, formulation)?);
        }

        Ok(TriplesMap {
            id: TriplesMapId(node_name(s)),
            logical_source,
            subject_map,
            predicate_object_maps,
        })
    }

    fn logical_source(&self, ls: &NamedOrBlankNode) -> Result<LogicalSource, MappingError> {
        let source = match self.at_most_one(ls, rml::SOURCE)? {
            Some(Term::Literal(l)) => l.value().to_owned(),
            Some(Term::NamedNode(n)) => n.as_str().to_owned(),
            Some(_) => return Err(model(ls, "only file path sources are supported")),
            None => return Err(model(ls, "missing rml:source")),
        };
        let formulation = match self.iri(ls, rml::REFERENCE_FORMULATION)?.as_deref() {
            Some(ql::JSON_PATH) => Formulation::JsonPath,
            Some(ql::XPATH) => Formulation::XPath,
            Some(other) => {
                return Err(model(
                    ls,
                    format!("unsupported reference formulation <{other}>; only JSONPath and XPath are supported"),
                ))
            }
            None => return Err(model(ls, "missing rml:referenceFormulation")),
        };
        let iterator = self
            .string(ls, rml::ITERATOR)?
            .ok_or_else(|| model(ls, "missing rml:iterator"))?;
        if iterator.trim().is_empty() {
            return Err(model(ls, "empty rml:iterator"));
        }
        let mut path = PathExpression::parse(formulation, &iterator).map_err(|e| model(ls, e.to_string()))?;
        if path.is_relative() {
            // iterators are always evaluated from the document root
            let absolute = match formulation {
                Formulation::JsonPath if iterator.starts_with('[') => format!("${iterator}"),
                Formulation::JsonPath => format!("$.{iterator}"),
                Formulation::XPath => format!("/{iterator}"),
            };
            path = PathExpression::parse(formulation, &absolute).map_err(|e| model(ls, e.to_string()))?;
        }
        Ok(LogicalSource {
            source,
            reference_formulation: formulation,
            iterator: path,
        })
    }

    fn predicate_object_map(
        &self,
        pom: &NamedOrBlankNode,
        formulation: Formulation,
    ) -> Result<PredicateObjectMap, MappingError> {
        let mut predicates = Vec::new();
        for c in self.objects(pom, rr::PREDICATE) {
            predicates.push(self.constant(pom, c)?);
        }
        for pm in self.node_objects(pom, rr::PREDICATE_MAP)? {
            predicates.push(self.term_map(&pm, formulation)?);
        }
        let mut objects = Vec::new();
        for c in self.objects(pom, rr::OBJECT) {
            objects.push(self.constant(pom, c)?);
        }
        for om in self.node_objects(pom, rr::OBJECT_MAP)? {
            objects.push(self.term_map(&om, formulation)?);
        }
        if predicates.is_empty() {
            return Err(model(pom, "predicate-object map without predicate"));
        }
        if objects.is_empty() {
            return Err(model(pom, "predicate-object map without object"));
        }
        Ok(PredicateObjectMap {
            predicates,
            objects,
            graph_maps: self.graph_maps(pom)?,
        })
    }

    fn graph_maps(&self, s: &NamedOrBlankNode) -> Result<Vec<GraphMap>, MappingError> {
        let mut out = Vec::new();
        for g in self.objects(s, rr::GRAPH) {
            let description = to_rdf_term(g).map(|t| t.lexical().to_owned()).unwrap_or_default();
            out.push(GraphMap {
                is_default_graph: description == rr::DEFAULT_GRAPH,
                description,
            });
        }
        for gm in self.node_objects(s, rr::GRAPH_MAP)? {
            let (description, is_default_graph) = if let Some(c) = self.at_most_one(&gm, rr::CONSTANT)? {
                let d = to_rdf_term(c).map(|t| t.lexical().to_owned()).unwrap_or_default();
                let default = d == rr::DEFAULT_GRAPH;
                (d, default)
            } else if let Some(t) = self.string(&gm, rr::TEMPLATE)? {
                (t, false)
            } else if let Some(r) = self.string(&gm, rml::REFERENCE)? {
                (r, false)
            } else {
                (node_name(&gm), false)
            };
            out.push(GraphMap {
                description,
                is_default_graph,
            });
        }
        Ok(out)
    }

    fn constant(&self, owner: &NamedOrBlankNode, term: &Term) -> Result<TermMap, MappingError> {
        let value = to_rdf_term(term).ok_or_else(|| model(owner, "unsupported constant term"))?;
        Ok(TermMap::new(TermValue::Constant(value)))
    }

    fn term_map(&self, tm: &NamedOrBlankNode, formulation: Formulation) -> Result<TermMap, MappingError> {
        if self.has(tm, rr::COLUMN) {
            return Err(model(tm, "rr:column is not supported; use rml:reference"));
        }
        let mut values = Vec::new();
        if let Some(c) = self.at_most_one(tm, rr::CONSTANT)? {
            values.push(TermValue::Constant(
                to_rdf_term(c).ok_or_else(|| model(tm, "unsupported constant term"))?,
            ));
        }
        if let Some(r) = self.string(tm, rml::REFERENCE)? {
            values.push(TermValue::Reference(
                Reference::parse(formulation, &r).map_err(|e| model(tm, e.to_string()))?,
            ));
        }
        if let Some(t) = self.string(tm, rr::TEMPLATE)? {
            values.push(TermValue::Template(
                Template::parse(formulation, &t).map_err(|e| model(tm, e.to_string()))?,
            ));
        }
        if let Some(fv) = self.at_most_one(tm, fnml::FUNCTION_VALUE)? {
            let fv = as_node(fv).ok_or_else(|| model(tm, "fnml:functionValue must point to a resource"))?;
            values.push(TermValue::Function(self.function_call(&fv, formulation)?));
        }
        if let Some(parent) = self.at_most_one(tm, rr::PARENT_TRIPLES_MAP)? {
            let parent = as_node(parent).ok_or_else(|| model(tm, "rr:parentTriplesMap must be a resource"))?;
            let mut join_conditions = Vec::new();
            for jc in self.node_objects(tm, rr::JOIN_CONDITION)? {
                join_conditions.push(JoinCondition {
                    child: self.string(&jc, rr::CHILD)?.unwrap_or_default(),
                    parent: self.string(&jc, rr::PARENT)?.unwrap_or_default(),
                });
            }
            values.push(TermValue::ParentTriplesMap {
                parent: TriplesMapId(node_name(&parent)),
                join_conditions,
            });
        }
        let value = match values.len() {
            1 => values.pop().expect("one value"),
            0 => return Err(model(tm, "term map without rr:constant, rml:reference, rr:template, fnml:functionValue or rr:parentTriplesMap")),
            _ => return Err(model(tm, "term map with more than one value property")),
        };
        let term_type = match self.iri(tm, rr::TERM_TYPE)?.as_deref() {
            None => TermType::Default,
            Some(rr::IRI) => TermType::Iri,
            Some(rr::BLANK_NODE) => TermType::BlankNode,
            Some(rr::LITERAL) => TermType::Literal,
            Some(other) => return Err(model(tm, format!("unknown rr:termType <{other}>"))),
        };
        Ok(TermMap {
            value,
            term_type,
            datatype: self.iri(tm, rr::DATATYPE)?,
            language: self.string(tm, rr::LANGUAGE)?,
        })
    }

    fn function_call(&self, fv: &NamedOrBlankNode, formulation: Formulation) -> Result<FunctionCall, MappingError> {
        let mut function_iri = None;
        let mut parameters = Vec::new();
        for pom in self.node_objects(fv, rr::PREDICATE_OBJECT_MAP)? {
            let pom = self.predicate_object_map(&pom, formulation)?;
            for predicate in &pom.predicates {
                let TermValue::Constant(RdfTerm::Iri(p)) = &predicate.value else {
                    return Err(model(fv, "function parameters need constant IRI predicates"));
                };
                for object in &pom.objects {
                    if p == fno::EXECUTES || p == fno::EXECUTES_LEGACY {
                        match &object.value {
                            TermValue::Constant(RdfTerm::Iri(f)) => function_iri = Some(f.clone()),
                            _ => return Err(model(fv, "fno:executes needs a constant function IRI")),
                        }
                    } else {
                        parameters.push((p.clone(), object.clone()));
                    }
                }
            }
        }
        Ok(FunctionCall {
            function_iri: function_iri.ok_or_else(|| model(fv, "function value without fno:executes"))?,
            parameters,
        })
    }
}

fn model(s: &NamedOrBlankNode, message: impl Into<String>) -> MappingError {
    MappingError::Model {
        subject: node_name(s),
        message: message.into(),
    }
}
