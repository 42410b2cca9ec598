//! The declarative mapping model: triples maps, term maps and the rules that
//! check them.

mod parse;
mod template;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use parse::{parse_mapping_document, MappingError};
pub use template::{Template, TemplateError, TemplateSegment};
pub use validate::{
    is_valid_language_tag, resolve_roots, validate, Diagnostic, Severity, UnknownTriplesMap, UNSUPPORTED_JOIN, UNSUPPORTED_NAMED_GRAPHS,
};

use crate::rdf::RdfTerm;
use crate::source::{Formulation, PathExpression};

/// Identifier of a triples map: an absolute IRI, or `_:label` for blank nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplesMapId(pub String);

impl fmt::Display for TriplesMapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingDocument {
    pub triples_maps: Vec<TriplesMap>,
    pub prefixes: BTreeMap<String, String>,
    pub base_iri: Option<String>,
    /// SHA-256 of the document text, hex encoded.
    pub source_text_hash: String,
}

impl MappingDocument {
    pub fn get(&self, id: &TriplesMapId) -> Option<&TriplesMap> {
        self.triples_maps.iter().find(|m| &m.id == id)
    }

    pub fn position(&self, id: &TriplesMapId) -> Option<usize> {
        self.triples_maps.iter().position(|m| &m.id == id)
    }

    /// Looks a map up by full identifier, falling back to a unique map whose
    /// IRI ends in `/name` or `#name`.
    pub fn find(&self, name: &str) -> Option<&TriplesMap> {
        if let Some(m) = self.triples_maps.iter().find(|m| m.id.0 == name) {
            return Some(m);
        }
        let mut hits = self.triples_maps.iter().filter(|m| {
            m.id.0
                .strip_suffix(name)
                .is_some_and(|head| head.ends_with('/') || head.ends_with('#'))
        });
        match (hits.next(), hits.next()) {
            (Some(m), None) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriplesMap {
    pub id: TriplesMapId,
    pub logical_source: LogicalSource,
    pub subject_map: SubjectMap,
    pub predicate_object_maps: Vec<PredicateObjectMap>,
}

impl TriplesMap {
    /// Parent triples maps referenced by this map's object maps, with their
    /// join conditions.
    pub fn parent_references(&self) -> impl Iterator<Item = (&TriplesMapId, &[JoinCondition])> {
        self.predicate_object_maps
            .iter()
            .flat_map(|pom| pom.objects.iter())
            .filter_map(|om| match &om.value {
                TermValue::ParentTriplesMap {
                    parent,
                    join_conditions,
                } => Some((parent, join_conditions.as_slice())),
                _ => None,
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalSource {
    pub source: String,
    pub reference_formulation: Formulation,
    pub iterator: PathExpression,
}

impl LogicalSource {
    /// Two logical sources read the same document.
    pub fn same_document(&self, other: &LogicalSource) -> bool {
        self.source == other.source && self.reference_formulation == other.reference_formulation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectMap {
    pub term_map: TermMap,
    pub classes: Vec<String>,
    pub graph_maps: Vec<GraphMap>,
}

/// `predicates × objects` pairs are generated for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateObjectMap {
    pub predicates: Vec<TermMap>,
    pub objects: Vec<TermMap>,
    pub graph_maps: Vec<GraphMap>,
}

/// A graph map found in the document. Named graphs are not generated; graph
/// maps are kept only so they can be reported.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMap {
    pub description: String,
    pub is_default_graph: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermType {
    Iri,
    BlankNode,
    Literal,
    #[default]
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermMapKind {
    Constant,
    Reference,
    Template,
    FunctionValue,
    ParentTriplesMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermMap {
    pub value: TermValue,
    pub term_type: TermType,
    pub datatype: Option<String>,
    pub language: Option<String>,
}

impl TermMap {
    pub fn new(value: TermValue) -> Self {
        TermMap {
            value,
            term_type: TermType::Default,
            datatype: None,
            language: None,
        }
    }

    pub fn kind(&self) -> TermMapKind {
        match self.value {
            TermValue::Constant(_) => TermMapKind::Constant,
            TermValue::Reference(_) => TermMapKind::Reference,
            TermValue::Template(_) => TermMapKind::Template,
            TermValue::Function(_) => TermMapKind::FunctionValue,
            TermValue::ParentTriplesMap { .. } => TermMapKind::ParentTriplesMap,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermValue {
    Constant(RdfTerm),
    Reference(Reference),
    Template(Template),
    Function(FunctionCall),
    ParentTriplesMap {
        parent: TriplesMapId,
        join_conditions: Vec<JoinCondition>,
    },
}

/// A reference expression relative to the iterator, compiled for the
/// formulation of its logical source.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub text: String,
    pub path: PathExpression,
}

impl Reference {
    pub fn parse(formulation: Formulation, text: &str) -> Result<Self, crate::source::PathError> {
        Ok(Reference {
            text: text.to_owned(),
            path: PathExpression::parse_relative(formulation, text)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinCondition {
    pub child: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionCall {
    pub function_iri: String,
    pub parameters: Vec<(String, TermMap)>,
}
