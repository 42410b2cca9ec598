//! Execution of mapping jobs: nested result trees per root triples map.

mod functions;
mod terms;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

pub use functions::{FunctionArgument, FunctionImpl, FunctionRegistry};
pub use terms::{expand_template, generate_terms, iri_safe, TermPosition};
use terms::generate_terms_skipping;

use crate::mapping::{
    resolve_roots, validate, Diagnostic, MappingDocument, Severity, TemplateError, TermValue, TriplesMap,
};
use crate::rdf::{flatten, serialize_jsonld, serialize_ntriples, RdfTerm, TripleSet};
use crate::source::{evaluate_path, load_source, NodeHandle, NotAPrefix, PathError, PathExpression, SourceDocument, SourceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    NTriples,
    JsonLd,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("mapping document is not executable: {}", first_fatal(.0))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    SourceLoad(#[from] SourceError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    NotAPrefix(#[from] NotAPrefix),
    #[error("function <{0}> is not registered")]
    FunctionNotRegistered(String),
    #[error("function <{iri}> failed: {message}")]
    FunctionFailed { iri: String, message: String },
    #[error("invalid IRI `{0}`")]
    InvalidIri(String),
    #[error("unknown triples map `{0}`")]
    UnknownTriplesMap(String),
    #[error("invalid language tag `{0}`")]
    InvalidLanguageTag(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

fn first_fatal(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .find(|d| d.is_fatal())
        .map(ToString::to_string)
        .unwrap_or_default()
}

/// Everything needed to run a mapping document once.
#[derive(Debug, Clone)]
pub struct MappingJob {
    pub document: Arc<MappingDocument>,
    /// Directory that relative logical source paths are resolved against.
    pub source_dir: PathBuf,
    /// Logical source path as written in the mapping → file to read instead.
    pub source_overrides: BTreeMap<String, PathBuf>,
    pub root_selection: Option<Vec<String>>,
    pub global_language: Option<String>,
    pub function_registry: FunctionRegistry,
    pub output_format: OutputFormat,
    /// Abort on values that do not form valid IRIs instead of skipping them
    /// with a warning.
    pub strict_iris: bool,
    /// Already parsed sources keyed by logical source path; take precedence
    /// over files.
    pub sources: BTreeMap<String, Arc<SourceDocument>>,
}

impl MappingJob {
    pub fn new(document: impl Into<Arc<MappingDocument>>) -> Self {
        MappingJob {
            document: document.into(),
            source_dir: PathBuf::from("."),
            source_overrides: BTreeMap::new(),
            root_selection: None,
            global_language: None,
            function_registry: FunctionRegistry::with_builtins(),
            output_format: OutputFormat::NTriples,
            strict_iris: false,
            sources: BTreeMap::new(),
        }
    }

    pub fn with_source_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.source_dir = dir.into();
        self
    }

    pub fn with_source_override(mut self, declared: impl Into<String>, actual: impl Into<PathBuf>) -> Self {
        self.source_overrides.insert(declared.into(), actual.into());
        self
    }

    pub fn with_source_document(mut self, declared: impl Into<String>, doc: impl Into<Arc<SourceDocument>>) -> Self {
        self.sources.insert(declared.into(), doc.into());
        self
    }

    pub fn with_roots(mut self, roots: Vec<String>) -> Self {
        self.root_selection = Some(roots);
        self
    }

    pub fn with_global_language(mut self, tag: &str) -> Result<Self, EngineError> {
        if !crate::mapping::is_valid_language_tag(tag) {
            return Err(EngineError::InvalidLanguageTag(tag.to_owned()));
        }
        self.global_language = Some(tag.to_owned());
        Ok(self)
    }

    pub fn with_strict_iris(mut self, strict: bool) -> Self {
        self.strict_iris = strict;
        self
    }

    pub fn with_output_format(mut self, format: OutputFormat) -> Self {
        self.output_format = format;
        self
    }
}

/// One mapped node: its subject, classes and properties in mapping order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateNode {
    pub subject: RdfTerm,
    pub type_iris: Vec<String>,
    pub properties: Vec<(RdfTerm, Vec<PropertyValue>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyValue {
    Term(RdfTerm),
    Node(IntermediateNode),
}

impl IntermediateNode {
    pub fn new(subject: RdfTerm) -> Self {
        IntermediateNode {
            subject,
            type_iris: Vec::new(),
            properties: Vec::new(),
        }
    }

    /// Appends a value, grouping it with the previous one when the predicate
    /// repeats.
    pub fn push(&mut self, predicate: RdfTerm, value: PropertyValue) {
        match self.properties.last_mut() {
            Some((p, values)) if *p == predicate => values.push(value),
            _ => self.properties.push((predicate, vec![value])),
        }
    }

    /// Number of nodes in this tree, including itself.
    pub fn size(&self) -> usize {
        1 + self
            .properties
            .iter()
            .flat_map(|(_, vs)| vs)
            .map(|v| match v {
                PropertyValue::Node(n) => n.size(),
                PropertyValue::Term(_) => 0,
            })
            .sum::<usize>()
    }
}

#[derive(Debug, Clone)]
pub struct ExecutionOutput {
    pub nodes: Vec<IntermediateNode>,
    pub triples: TripleSet,
    pub diagnostics: Vec<Diagnostic>,
}

impl ExecutionOutput {
    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::NTriples => serialize_ntriples(&self.triples),
            OutputFormat::JsonLd => serialize_jsonld(&self.nodes).into_bytes(),
        }
    }
}

/// Runs the job and returns the deduplicated triples.
pub fn run_job(job: &MappingJob) -> Result<TripleSet, EngineError> {
    execute(job).map(|out| out.triples)
}

/// Runs the job, keeping the nested result trees and all diagnostics
/// (validation findings plus warnings raised while mapping).
pub fn execute(job: &MappingJob) -> Result<ExecutionOutput, EngineError> {
    let mut diagnostics = validate(&job.document);
    if diagnostics.iter().any(Diagnostic::is_fatal) {
        return Err(EngineError::Invalid(diagnostics));
    }
    for declared in job.source_overrides.keys() {
        if !job.document.triples_maps.iter().any(|m| &m.logical_source.source == declared) {
            diagnostics.push(Diagnostic::new(
                Severity::Warning,
                "source override matches no logical source",
                declared.clone(),
            ));
        }
    }
    let roots = resolve_roots(&job.document, job.root_selection.as_deref())
        .map_err(|e| EngineError::UnknownTriplesMap(e.0))?;
    let mut exec = Executor::new(job);
    let mut nodes = Vec::new();
    for root in roots {
        let doc = exec.source(root)?;
        for scope in evaluate_path(doc.root(), &root.logical_source.iterator)? {
            nodes.extend(exec.map_node(root, scope)?);
        }
    }
    diagnostics.extend(exec.warnings);
    let triples = flatten(&nodes);
    Ok(ExecutionOutput {
        nodes,
        triples,
        diagnostics,
    })
}

/// How an object map's parent triples map is reached from a node.
#[derive(Debug, Clone)]
enum Link {
    /// Evaluate `relative` against the current node and map the parent there.
    Nested { parent: usize, relative: PathExpression },
    /// Join condition or other source: the linking predicate is skipped.
    Detached,
    NotAPrefix(NotAPrefix),
}

struct Executor<'j> {
    job: &'j MappingJob,
    links: HashMap<(usize, usize, usize), Link>,
    sources: HashMap<String, Arc<SourceDocument>>,
    /// (map index, node) pairs currently being mapped.
    stack: Vec<(usize, usize)>,
    warnings: Vec<Diagnostic>,
    skipped_seen: HashSet<Diagnostic>,
    multi_subject_warned: Vec<bool>,
}

impl<'j> Executor<'j> {
    fn new(job: &'j MappingJob) -> Self {
        let doc = &job.document;
        let mut links = HashMap::new();
        for (mi, map) in doc.triples_maps.iter().enumerate() {
            for (pi, pom) in map.predicate_object_maps.iter().enumerate() {
                for (oi, om) in pom.objects.iter().enumerate() {
                    let TermValue::ParentTriplesMap { parent, join_conditions } = &om.value else {
                        continue;
                    };
                    // validation guarantees the parent exists
                    let Some(parent_index) = doc.position(parent) else {
                        continue;
                    };
                    let parent_map = &doc.triples_maps[parent_index];
                    let link = if !join_conditions.is_empty()
                        || !map.logical_source.same_document(&parent_map.logical_source)
                    {
                        Link::Detached
                    } else {
                        match crate::source::compute_relative_iterator(
                            &map.logical_source.iterator,
                            &parent_map.logical_source.iterator,
                        ) {
                            Ok(relative) => Link::Nested {
                                parent: parent_index,
                                relative,
                            },
                            Err(e) => Link::NotAPrefix(e),
                        }
                    };
                    links.insert((mi, pi, oi), link);
                }
            }
        }
        Executor {
            job,
            links,
            sources: HashMap::new(),
            stack: Vec::new(),
            warnings: Vec::new(),
            skipped_seen: HashSet::new(),
            multi_subject_warned: vec![false; doc.triples_maps.len()],
        }
    }

    fn source(&mut self, map: &TriplesMap) -> Result<Arc<SourceDocument>, EngineError> {
        let declared = &map.logical_source.source;
        if let Some(doc) = self.sources.get(declared) {
            return Ok(doc.clone());
        }
        let doc = match self.job.sources.get(declared) {
            Some(doc) => doc.clone(),
            None => {
                let path = match self.job.source_overrides.get(declared) {
                    Some(p) => p.clone(),
                    None => self.job.source_dir.join(declared),
                };
                let format = match map.logical_source.reference_formulation {
                    crate::source::Formulation::JsonPath => crate::source::SourceFormat::Json,
                    crate::source::Formulation::XPath => crate::source::SourceFormat::Xml,
                };
                Arc::new(load_source(path, format)?)
            }
        };
        self.sources.insert(declared.clone(), doc.clone());
        Ok(doc)
    }

    fn terms(
        &mut self,
        tm: &crate::mapping::TermMap,
        scope: NodeHandle<'_>,
        position: TermPosition,
        map: &TriplesMap,
    ) -> Result<Vec<RdfTerm>, EngineError> {
        if self.job.strict_iris {
            return generate_terms(tm, scope, position, self.job);
        }
        let mut skipped = Vec::new();
        let terms = generate_terms_skipping(tm, scope, position, self.job, &mut skipped)?;
        for value in skipped {
            let d = Diagnostic::new(
                Severity::Warning,
                format!("`{value}` is not a valid IRI; term skipped"),
                map.id.to_string(),
            );
            if self.skipped_seen.insert(d.clone()) {
                self.warnings.push(d);
            }
        }
        Ok(terms)
    }

    fn map_index(&self, map: &TriplesMap) -> usize {
        self.job.document.position(&map.id).expect("map belongs to the job's document")
    }

    /// Maps one node: the subject first, then every predicate-object map in
    /// order. Parent triples maps recurse into the nodes their relative
    /// iterator selects below `scope`. Several subject terms give several
    /// nodes with the same properties; none gives no node.
    fn map_node(&mut self, map: &TriplesMap, scope: NodeHandle<'_>) -> Result<Vec<IntermediateNode>, EngineError> {
        let mi = self.map_index(map);
        let subjects = self.terms(&map.subject_map.term_map, scope, TermPosition::Subject, map)?;
        if subjects.is_empty() {
            return Ok(Vec::new());
        }
        if subjects.len() > 1 && !self.multi_subject_warned[mi] {
            self.multi_subject_warned[mi] = true;
            self.warnings.push(Diagnostic::new(
                Severity::Warning,
                "subject map yields several subjects for one node",
                format!("{} subject map", map.id),
            ));
        }

        let frame = (mi, scope.id().index());
        self.stack.push(frame);
        let body = self.map_body(map, mi, scope);
        self.stack.pop();
        let mut body = body?;
        body.type_iris = map.subject_map.classes.clone();

        let mut nodes = Vec::with_capacity(subjects.len());
        let last = subjects.len() - 1;
        for (i, subject) in subjects.into_iter().enumerate() {
            let mut node = if i == last {
                std::mem::replace(&mut body, IntermediateNode::new(RdfTerm::literal("")))
            } else {
                body.clone()
            };
            node.subject = subject;
            nodes.push(node);
        }
        Ok(nodes)
    }

    fn map_body(&mut self, map: &TriplesMap, mi: usize, scope: NodeHandle<'_>) -> Result<IntermediateNode, EngineError> {
        let mut node = IntermediateNode::new(RdfTerm::literal(""));
        for (pi, pom) in map.predicate_object_maps.iter().enumerate() {
            let mut predicates = Vec::new();
            for ptm in &pom.predicates {
                predicates.extend(self.terms(ptm, scope, TermPosition::Predicate, map)?);
            }
            if predicates.is_empty() {
                continue;
            }
            let mut values = Vec::new();
            for (oi, om) in pom.objects.iter().enumerate() {
                if let TermValue::ParentTriplesMap { .. } = om.value {
                    self.map_parent(&self.links[&(mi, pi, oi)].clone(), scope, &mut values)?;
                } else {
                    values.extend(
                        self.terms(om, scope, TermPosition::Object, map)?
                            .into_iter()
                            .map(PropertyValue::Term),
                    );
                }
            }
            for p in &predicates {
                for v in &values {
                    node.push(p.clone(), v.clone());
                }
            }
        }
        Ok(node)
    }

    fn map_parent(
        &mut self,
        link: &Link,
        scope: NodeHandle<'_>,
        values: &mut Vec<PropertyValue>,
    ) -> Result<(), EngineError> {
        let (parent, relative) = match link {
            Link::Detached => return Ok(()),
            Link::NotAPrefix(e) => return Err(e.clone().into()),
            Link::Nested { parent, relative } => (*parent, relative),
        };
        let job = self.job;
        let parent_map = &job.document.triples_maps[parent];
        for child in evaluate_path(scope, relative)? {
            if self.stack.contains(&(parent, child.id().index())) {
                // already being mapped further up: link the subject only
                values.extend(
                    self.terms(&parent_map.subject_map.term_map, child, TermPosition::Subject, parent_map)?
                        .into_iter()
                        .map(PropertyValue::Term),
                );
            } else {
                values.extend(self.map_node(parent_map, child)?.into_iter().map(PropertyValue::Node));
            }
        }
        Ok(())
    }
}
