//! Term generation for constant, reference, template and function term maps.

use super::functions::FunctionArgument;
use super::{EngineError, MappingJob};
use crate::mapping::{Template, TemplateSegment, TermMap, TermType, TermValue};
use crate::rdf::{Literal, RdfTerm};
use crate::source::{extract_with, NodeHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermPosition {
    Subject,
    Predicate,
    Object,
}

/// Generates the RDF terms a (non parent triples map) term map yields for
/// `scope`. Missing references yield no terms rather than an error; a value
/// that does not form a valid IRI is an error.
pub fn generate_terms(
    tm: &TermMap,
    scope: NodeHandle<'_>,
    position: TermPosition,
    job: &MappingJob,
) -> Result<Vec<RdfTerm>, EngineError> {
    generate(tm, scope, position, job, &mut |value| Err(EngineError::InvalidIri(value)))
}

/// Like [`generate_terms`], but values that do not form valid IRIs are
/// handed to `skipped` and left out.
pub(crate) fn generate_terms_skipping(
    tm: &TermMap,
    scope: NodeHandle<'_>,
    position: TermPosition,
    job: &MappingJob,
    skipped: &mut Vec<String>,
) -> Result<Vec<RdfTerm>, EngineError> {
    generate(tm, scope, position, job, &mut |value| {
        skipped.push(value);
        Ok(())
    })
}

fn generate(
    tm: &TermMap,
    scope: NodeHandle<'_>,
    position: TermPosition,
    job: &MappingJob,
    invalid_iri: &mut dyn FnMut(String) -> Result<(), EngineError>,
) -> Result<Vec<RdfTerm>, EngineError> {
    if let TermValue::Constant(term) = &tm.value {
        return Ok(vec![match term {
            RdfTerm::Literal(l) if l.is_plain() => match &job.global_language {
                Some(lang) => Literal::with_language(l.lexical(), lang.as_str()).into(),
                None => term.clone(),
            },
            other => other.clone(),
        }]);
    }
    let term_type = effective_term_type(tm, position);
    let values = term_values(tm, scope, term_type == TermType::Iri, job)?;
    let mut terms = Vec::with_capacity(values.len());
    for v in values {
        match term_type {
            TermType::Iri => match absolute_iri(v, job.document.base_iri.as_deref()) {
                Ok(iri) => terms.push(RdfTerm::Iri(iri)),
                Err(value) => invalid_iri(value)?,
            },
            TermType::BlankNode => terms.push(RdfTerm::BlankNode(v)),
            _ => terms.push(RdfTerm::Literal(literal(v, tm, job))),
        }
    }
    Ok(terms)
}

/// R2RML defaulting: subjects and predicates are IRIs; objects are literals
/// when produced by a reference or function or when a datatype or language
/// is given, IRIs otherwise.
pub(crate) fn effective_term_type(tm: &TermMap, position: TermPosition) -> TermType {
    if position == TermPosition::Subject && tm.term_type == TermType::Literal {
        // reported by validation; subjects fall back to IRIs
        return TermType::Iri;
    }
    if tm.term_type != TermType::Default {
        return tm.term_type;
    }
    match position {
        TermPosition::Subject | TermPosition::Predicate => TermType::Iri,
        TermPosition::Object => match &tm.value {
            TermValue::Reference(_) | TermValue::Function(_) => TermType::Literal,
            _ if tm.language.is_some() || tm.datatype.is_some() => TermType::Literal,
            TermValue::Constant(RdfTerm::Literal(_)) => TermType::Literal,
            TermValue::Constant(RdfTerm::BlankNode(_)) => TermType::BlankNode,
            _ => TermType::Iri,
        },
    }
}

fn literal(value: String, tm: &TermMap, job: &MappingJob) -> Literal {
    if let Some(lang) = &tm.language {
        Literal::with_language(value, lang.as_str())
    } else if let Some(dt) = &tm.datatype {
        Literal::typed(value, dt.as_str())
    } else if let Some(lang) = &job.global_language {
        Literal::with_language(value, lang.as_str())
    } else {
        Literal::plain(value)
    }
}

/// Raw string values of a term map before they are turned into terms.
fn term_values(
    tm: &TermMap,
    scope: NodeHandle<'_>,
    iri_context: bool,
    job: &MappingJob,
) -> Result<Vec<String>, EngineError> {
    match &tm.value {
        TermValue::Constant(t) => Ok(vec![t.lexical().to_owned()]),
        TermValue::Reference(r) => Ok(extract_with(scope, &r.path)?),
        TermValue::Template(t) => expand(t, scope, iri_context),
        TermValue::Function(call) => {
            let f = job
                .function_registry
                .get(&call.function_iri)
                .ok_or_else(|| EngineError::FunctionNotRegistered(call.function_iri.clone()))?;
            let mut args = Vec::with_capacity(call.parameters.len());
            for (parameter, ptm) in &call.parameters {
                let nested_iri = effective_term_type(ptm, TermPosition::Object) == TermType::Iri;
                args.push(FunctionArgument {
                    parameter: parameter.clone(),
                    values: term_values(ptm, scope, nested_iri, job)?,
                });
            }
            f(&args).map_err(|message| EngineError::FunctionFailed {
                iri: call.function_iri.clone(),
                message,
            })
        }
        TermValue::ParentTriplesMap { .. } => Ok(Vec::new()),
    }
}

/// Expands a template string against `scope`: every placeholder is replaced
/// by each of its values (cross product, first placeholder varying slowest);
/// a placeholder without values yields no result at all. In an IRI context
/// values are percent-encoded first.
pub fn expand_template(template: &str, scope: NodeHandle<'_>, iri_context: bool) -> Result<Vec<String>, EngineError> {
    let t = Template::parse(scope.document().format().formulation(), template)?;
    expand(&t, scope, iri_context)
}

pub(crate) fn expand(t: &Template, scope: NodeHandle<'_>, iri_context: bool) -> Result<Vec<String>, EngineError> {
    let mut results = vec![String::new()];
    for segment in &t.segments {
        match segment {
            TemplateSegment::Literal(s) => results.iter_mut().for_each(|r| r.push_str(s)),
            TemplateSegment::Reference(reference) => {
                let mut values = extract_with(scope, &reference.path)?;
                if values.is_empty() {
                    return Ok(Vec::new());
                }
                if iri_context {
                    values = values.iter().map(|v| iri_safe(v)).collect();
                }
                results = if values.len() == 1 {
                    results.iter_mut().for_each(|r| r.push_str(&values[0]));
                    results
                } else {
                    results
                        .iter()
                        .flat_map(|r| values.iter().map(move |v| format!("{r}{v}")))
                        .collect()
                };
            }
        }
    }
    Ok(results)
}

/// Percent-encodes every character outside `iunreserved` as UTF-8 octets.
pub fn iri_safe(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        if c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '_' | '~') || is_ucschar(c) {
            out.push(c);
        } else {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        }
    }
    out
}

fn is_ucschar(c: char) -> bool {
    let c = c as u32;
    matches!(c,
        0xA0..=0xD7FF | 0xF900..=0xFDCF | 0xFDF0..=0xFFEF
        | 0x10000..=0x1FFFD | 0x20000..=0x2FFFD | 0x30000..=0x3FFFD
        | 0x40000..=0x4FFFD | 0x50000..=0x5FFFD | 0x60000..=0x6FFFD
        | 0x70000..=0x7FFFD | 0x80000..=0x8FFFD | 0x90000..=0x9FFFD
        | 0xA0000..=0xAFFFD | 0xB0000..=0xBFFFD | 0xC0000..=0xCFFFD
        | 0xD0000..=0xDFFFD | 0xE1000..=0xEFFFD)
}

/// Accepts `value` if it is an absolute IRI, otherwise tries it appended to
/// the base IRI. Gives the value back when neither is valid.
fn absolute_iri(value: String, base: Option<&str>) -> Result<String, String> {
    if oxiri::Iri::parse(value.as_str()).is_ok() {
        return Ok(value);
    }
    if let Some(base) = base {
        let joined = format!("{base}{value}");
        if oxiri::Iri::parse(joined.as_str()).is_ok() {
            return Ok(joined);
        }
    }
    Err(value)
}
