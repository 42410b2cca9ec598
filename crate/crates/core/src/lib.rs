//! RML mapping engine for JSON and XML sources.
//!
//! Mapping documents are parsed from Turtle into a [`mapping::MappingDocument`],
//! sources are loaded into format-neutral trees ([`source::SourceDocument`]) and
//! the [`engine`] builds nested result trees per root triples map. Nested
//! (parent triples map) objects are linked through iterators relative to the
//! enclosing node instead of join conditions, so child objects only ever attach
//! to the node they are nested in.

pub mod bench;
pub mod conformance;
pub mod engine;
pub mod mapping;
pub mod rdf;
pub mod source;
pub mod vocab;

pub use engine::{run_job, ExecutionOutput, FunctionRegistry, MappingJob, OutputFormat};
pub use mapping::{parse_mapping_document, resolve_roots, validate, MappingDocument};
pub use rdf::{RdfTerm, Triple, TripleSet};
pub use source::{load_source, NodeHandle, PathExpression, SourceDocument, SourceFormat};
