//! RDF term model, flattening of nested results and output serializers.

mod flatten;
mod isomorphism;
mod jsonld;
mod ntriples;

use std::fmt;

use indexmap::IndexSet;

pub use flatten::{flatten, BlankLabeler};
pub use isomorphism::isomorphic;
pub use jsonld::serialize_jsonld;
pub use ntriples::{serialize_ntriples, write_ntriples};

use crate::vocab::xsd;

/// An RDF literal. `xsd:string` typed literals are stored as plain literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Option<String>,
    language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        Literal {
            lexical: lexical.into(),
            datatype: (datatype != xsd::STRING).then_some(datatype),
            language: None,
        }
    }

    /// Language tags are stored lowercased, their canonical comparison form.
    pub fn with_language(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_plain(&self) -> bool {
        self.datatype.is_none() && self.language.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RdfTerm {
    Iri(String),
    /// Blank node identified by its label (without the `_:` prefix).
    BlankNode(String),
    Literal(Literal),
}

impl RdfTerm {
    pub fn iri(value: impl Into<String>) -> Self {
        RdfTerm::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        RdfTerm::BlankNode(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        RdfTerm::Literal(Literal::plain(lexical))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, RdfTerm::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, RdfTerm::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, RdfTerm::Literal(_))
    }

    /// Lexical form: the IRI, the blank node label or the literal value.
    pub fn lexical(&self) -> &str {
        match self {
            RdfTerm::Iri(v) | RdfTerm::BlankNode(v) => v,
            RdfTerm::Literal(l) => l.lexical(),
        }
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        ntriples::write_term(&mut out, self);
        f.write_str(&out)
    }
}

impl From<Literal> for RdfTerm {
    fn from(l: Literal) -> Self {
        RdfTerm::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: RdfTerm,
    pub predicate: RdfTerm,
    pub object: RdfTerm,
}

impl Triple {
    /// Returns `None` when the terms violate positional constraints
    /// (literal subject, non-IRI predicate).
    pub fn new(subject: RdfTerm, predicate: RdfTerm, object: RdfTerm) -> Option<Self> {
        if subject.is_literal() || !predicate.is_iri() {
            return None;
        }
        Some(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Ordered, duplicate-free collection of triples. Insertion order is kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleSet {
    triples: IndexSet<Triple>,
}

impl TripleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }
}

impl FromIterator<Triple> for TripleSet {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        TripleSet {
            triples: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for TripleSet {
    type Item = Triple;
    type IntoIter = indexmap::set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a TripleSet {
    type Item = &'a Triple;
    type IntoIter = indexmap::set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}
