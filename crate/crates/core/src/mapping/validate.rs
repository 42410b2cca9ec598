use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{MappingDocument, TermMap, TermType, TermValue, TriplesMap};
use crate::rdf::RdfTerm;
use crate::source::compute_relative_iterator;

pub const UNSUPPORTED_NAMED_GRAPHS: &str = "unsupported: named graphs";
pub const UNSUPPORTED_JOIN: &str = "unsupported: join";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    /// The document cannot be executed.
    Error,
    /// A construct the engine ignores at run time.
    Unsupported,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Unsupported => "unsupported",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub location: String,
}

impl Diagnostic {
    pub fn new(severity: Severity, message: impl Into<String>, location: impl Into<String>) -> Self {
        Diagnostic {
            severity,
            message: message.into(),
            location: location.into(),
        }
    }

    pub fn is_fatal(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.severity, self.message, self.location)
    }
}

/// Checks model invariants and reports constructs the engine does not
/// execute (join conditions, graph maps). Never fails.
pub fn validate(doc: &MappingDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for map in &doc.triples_maps {
        if !seen.insert(&map.id) {
            out.push(Diagnostic::new(Severity::Error, "duplicate triples map identifier", map.id.to_string()));
        }
    }
    for map in &doc.triples_maps {
        validate_map(doc, map, &mut out);
    }
    out
}

fn validate_map(doc: &MappingDocument, map: &TriplesMap, out: &mut Vec<Diagnostic>) {
    let loc = |what: &str| format!("{} {what}", map.id);

    let sm = &map.subject_map;
    let subject_loc = loc("subject map");
    match (&sm.term_map.value, sm.term_map.term_type) {
        (TermValue::Constant(RdfTerm::Literal(_)), _) => out.push(Diagnostic::new(
            Severity::Error,
            "subject map cannot produce literals",
            &subject_loc,
        )),
        (_, TermType::Literal) => out.push(Diagnostic::new(
            Severity::Warning,
            "rr:Literal term type ignored on subject map; IRIs are generated",
            &subject_loc,
        )),
        (TermValue::ParentTriplesMap { .. }, _) => out.push(Diagnostic::new(
            Severity::Error,
            "subject map cannot reference a parent triples map",
            &subject_loc,
        )),
        _ => {}
    }
    check_term_map(&sm.term_map, &subject_loc, out);
    if !sm.graph_maps.is_empty() {
        out.push(Diagnostic::new(Severity::Unsupported, UNSUPPORTED_NAMED_GRAPHS, &subject_loc));
    }

    for (i, pom) in map.predicate_object_maps.iter().enumerate() {
        let pom_loc = loc(&format!("predicate-object map #{}", i + 1));
        if !pom.graph_maps.is_empty() {
            out.push(Diagnostic::new(Severity::Unsupported, UNSUPPORTED_NAMED_GRAPHS, &pom_loc));
        }
        for p in &pom.predicates {
            let bad = match &p.value {
                TermValue::Constant(t) => !t.is_iri(),
                TermValue::ParentTriplesMap { .. } => true,
                _ => !matches!(p.term_type, TermType::Default | TermType::Iri),
            };
            if bad {
                out.push(Diagnostic::new(Severity::Error, "predicate map must produce IRIs", &pom_loc));
            }
            check_term_map(p, &pom_loc, out);
        }
        for o in &pom.objects {
            check_term_map(o, &pom_loc, out);
            let TermValue::ParentTriplesMap { parent, join_conditions } = &o.value else {
                continue;
            };
            let Some(parent_map) = doc.get(parent) else {
                out.push(Diagnostic::new(
                    Severity::Error,
                    format!("parent triples map {parent} does not exist"),
                    &pom_loc,
                ));
                continue;
            };
            if !join_conditions.is_empty() {
                out.push(Diagnostic::new(Severity::Unsupported, UNSUPPORTED_JOIN, &pom_loc));
            } else if !parent_map.logical_source.same_document(&map.logical_source) {
                out.push(Diagnostic::new(
                    Severity::Warning,
                    format!("parent triples map {parent} reads another source; the link is not generated"),
                    &pom_loc,
                ));
            }
        }
    }
}

/// Well-formed BCP 47 tag whose primary language subtag could be assigned:
/// 5 to 8 letter primary subtags are well-formed but none are registered.
pub fn is_valid_language_tag(tag: &str) -> bool {
    match oxilangtag::LanguageTag::parse(tag) {
        Ok(t) => t.primary_language().len() <= 3 || tag.starts_with("x-") || tag.starts_with("i-"),
        Err(_) => false,
    }
}

fn check_term_map(tm: &TermMap, loc: &str, out: &mut Vec<Diagnostic>) {
    if tm.datatype.is_some() && tm.language.is_some() {
        out.push(Diagnostic::new(
            Severity::Error,
            "term map has both rr:datatype and rr:language",
            loc,
        ));
    }
    if let Some(lang) = &tm.language {
        if !is_valid_language_tag(lang) {
            out.push(Diagnostic::new(
                Severity::Error,
                format!("invalid language tag `{lang}`"),
                loc,
            ));
        }
    }
    if (tm.datatype.is_some() || tm.language.is_some())
        && matches!(tm.term_type, TermType::Iri | TermType::BlankNode)
    {
        out.push(Diagnostic::new(
            Severity::Error,
            "rr:datatype and rr:language require literal term maps",
            loc,
        ));
    }
    if let TermValue::Function(call) = &tm.value {
        if call.function_iri.is_empty() {
            out.push(Diagnostic::new(Severity::Error, "function IRI is empty", loc));
        }
        for (param, ptm) in &call.parameters {
            if matches!(ptm.value, TermValue::ParentTriplesMap { .. }) {
                out.push(Diagnostic::new(
                    Severity::Error,
                    format!("function parameter <{param}> cannot reference a parent triples map"),
                    loc,
                ));
            }
            check_term_map(ptm, loc, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown triples map `{0}`")]
pub struct UnknownTriplesMap(pub String);

/// Root triples maps: the requested ones in the given order, or else every
/// map that is not nested below another map, in document order. A map is
/// nested when another map references it as parent triples map without join
/// conditions, over the same source, with an iterator strictly below the
/// referencing map's iterator.
pub fn resolve_roots<'d>(
    doc: &'d MappingDocument,
    requested: Option<&[String]>,
) -> Result<Vec<&'d TriplesMap>, UnknownTriplesMap> {
    if let Some(ids) = requested {
        return ids
            .iter()
            .map(|id| doc.find(id).ok_or_else(|| UnknownTriplesMap(id.clone())))
            .collect();
    }
    let nested: HashSet<_> = doc
        .triples_maps
        .iter()
        .flat_map(|m| {
            m.parent_references()
                .filter(|(_, joins)| joins.is_empty())
                .filter_map(|(p, _)| doc.get(p))
                .filter(move |p| is_nested_below(m, p))
                .map(|p| &p.id)
        })
        .collect();
    Ok(doc
        .triples_maps
        .iter()
        .filter(|m| !nested.contains(&m.id))
        .collect())
}

pub(crate) fn is_nested_below(outer: &TriplesMap, inner: &TriplesMap) -> bool {
    outer.id != inner.id
        && outer.logical_source.same_document(&inner.logical_source)
        && compute_relative_iterator(&outer.logical_source.iterator, &inner.logical_source.iterator)
            .is_ok_and(|rel| !rel.is_current())
}
