//! Source documents (JSON or XML) loaded into a format-neutral node arena,
//! plus the path expressions evaluated against them.
//!
//! Nodes are numbered in document order (pre-order, attributes before
//! children), so a node's id doubles as its document order index.

mod load;
mod path;

use std::path::PathBuf;

pub use load::{load_source, parse_source, SourceError};
pub use path::{compute_relative_iterator, Formulation, NotAPrefix, PathError, PathExpression};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SourceFormat {
    Json,
    Xml,
}

impl SourceFormat {
    pub fn formulation(self) -> Formulation {
        match self {
            SourceFormat::Json => Formulation::JsonPath,
            SourceFormat::Xml => Formulation::XPath,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Object(Vec<(String, NodeId)>),
    Array(Vec<NodeId>),
    /// JSON string, number (lexical form) or boolean.
    Scalar(String),
    Null,
    Document(Vec<NodeId>),
    Element {
        name: String,
        attributes: Vec<NodeId>,
        children: Vec<NodeId>,
    },
    Attribute {
        name: String,
        value: String,
    },
    Text(String),
}

#[derive(Debug, Clone)]
pub struct SourceDocument {
    format: SourceFormat,
    origin: PathBuf,
    byte_size: u64,
    nodes: Vec<Node>,
}

impl SourceDocument {
    pub fn format(&self) -> SourceFormat {
        self.format
    }

    pub fn origin(&self) -> &std::path::Path {
        &self.origin
    }

    pub fn byte_size(&self) -> u64 {
        self.byte_size
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeHandle<'_> {
        NodeHandle {
            doc: self,
            id: NodeId(0),
        }
    }

    pub(crate) fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub(crate) fn handle(&self, id: NodeId) -> NodeHandle<'_> {
        NodeHandle { doc: self, id }
    }
}

/// A reference to one node of a [`SourceDocument`].
#[derive(Clone, Copy)]
pub struct NodeHandle<'a> {
    doc: &'a SourceDocument,
    id: NodeId,
}

impl PartialEq for NodeHandle<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.doc, other.doc) && self.id == other.id
    }
}

impl Eq for NodeHandle<'_> {}

impl std::fmt::Debug for NodeHandle<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NodeHandle({})", self.id.0)
    }
}

impl<'a> NodeHandle<'a> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn document(&self) -> &'a SourceDocument {
        self.doc
    }

    pub fn document_order_index(&self) -> usize {
        self.id.index()
    }

    pub(crate) fn node(&self) -> &'a Node {
        self.doc.node(self.id)
    }

    /// Number of items for JSON arrays, `None` otherwise.
    pub fn array_len(&self) -> Option<usize> {
        match self.node() {
            Node::Array(items) => Some(items.len()),
            _ => None,
        }
    }

    pub fn is_object(&self) -> bool {
        matches!(self.node(), Node::Object(_))
    }

    /// Element or attribute name for XML nodes.
    pub fn name(&self) -> Option<&'a str> {
        match self.node() {
            Node::Element { name, .. } | Node::Attribute { name, .. } => Some(name),
            _ => None,
        }
    }

    /// String values of this node as used for references: JSON scalars as
    /// their lexical form (null yields nothing, arrays yield their scalar
    /// items), XML elements as their concatenated descendant text.
    pub fn values(&self) -> Vec<String> {
        match self.node() {
            Node::Scalar(s) => vec![s.clone()],
            Node::Null | Node::Object(_) => Vec::new(),
            Node::Array(items) => items
                .iter()
                .filter_map(|id| match self.doc.node(*id) {
                    Node::Scalar(s) => Some(s.clone()),
                    _ => None,
                })
                .collect(),
            Node::Attribute { value, .. } => vec![value.clone()],
            Node::Text(t) => vec![t.clone()],
            Node::Document(_) | Node::Element { .. } => {
                let mut out = String::new();
                self.collect_text(&mut out);
                vec![out]
            }
        }
    }

    fn collect_text(&self, out: &mut String) {
        match self.node() {
            Node::Text(t) => out.push_str(t),
            Node::Document(children) | Node::Element { children, .. } => {
                for c in children {
                    self.doc.handle(*c).collect_text(out);
                }
            }
            _ => {}
        }
    }
}

/// Evaluates `expr` with `scope` as context node. Absolute expressions are
/// evaluated from the document root. Results are in document order.
pub fn evaluate_path<'a>(
    scope: NodeHandle<'a>,
    expr: &PathExpression,
) -> Result<Vec<NodeHandle<'a>>, PathError> {
    let doc = scope.document();
    if doc.format().formulation() != expr.formulation() {
        return Err(PathError::FormulationMismatch {
            expr: expr.text().to_owned(),
            format: doc.format(),
        });
    }
    let start = if expr.is_relative() { scope.id } else { NodeId(0) };
    Ok(path::select(doc, start, expr)
        .into_iter()
        .map(|id| doc.handle(id))
        .collect())
}

/// String values selected by a relative `reference` from `scope`.
pub fn extract_values(scope: NodeHandle<'_>, reference: &str) -> Result<Vec<String>, PathError> {
    let expr = PathExpression::parse_relative(scope.document().format().formulation(), reference)?;
    extract_with(scope, &expr)
}

pub(crate) fn extract_with(
    scope: NodeHandle<'_>,
    expr: &PathExpression,
) -> Result<Vec<String>, PathError> {
    Ok(evaluate_path(scope, expr)?
        .into_iter()
        .flat_map(|n| n.values())
        .collect())
}
