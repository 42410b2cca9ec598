use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use super::{Node, NodeId, SourceDocument, SourceFormat};

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("cannot read {path}: {cause}")]
    Io { path: PathBuf, cause: std::io::Error },
    #[error("{path}: parse error at byte {offset}: {message}")]
    Parse {
        path: PathBuf,
        offset: usize,
        message: String,
    },
    #[error("{path}: declared as {declared:?} but the content is not {declared:?}")]
    FormatMismatch { path: PathBuf, declared: SourceFormat },
}

/// Reads and fully parses a source file.
pub fn load_source(path: impl AsRef<Path>, format: SourceFormat) -> Result<SourceDocument, SourceError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|cause| SourceError::Io {
        path: path.to_owned(),
        cause,
    })?;
    parse_source(&bytes, format, path)
}

/// Parses an in-memory source; `origin` is only used for reporting.
pub fn parse_source(
    bytes: &[u8],
    format: SourceFormat,
    origin: impl Into<PathBuf>,
) -> Result<SourceDocument, SourceError> {
    let origin = origin.into();
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let first = bytes.iter().copied().find(|b| !b.is_ascii_whitespace());
    let mismatch = match format {
        SourceFormat::Json => first == Some(b'<'),
        SourceFormat::Xml => matches!(first, Some(b'{') | Some(b'[')),
    };
    if mismatch {
        return Err(SourceError::FormatMismatch {
            path: origin,
            declared: format,
        });
    }
    let nodes = match format {
        SourceFormat::Json => parse_json(bytes).map_err(|(offset, message)| SourceError::Parse {
            path: origin.clone(),
            offset,
            message,
        })?,
        SourceFormat::Xml => parse_xml(bytes).map_err(|(offset, message)| SourceError::Parse {
            path: origin.clone(),
            offset,
            message,
        })?,
    };
    Ok(SourceDocument {
        format,
        origin,
        byte_size: bytes.len() as u64,
        nodes,
    })
}

fn parse_json(bytes: &[u8]) -> Result<Vec<Node>, (usize, String)> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| {
        let offset = line_column_offset(bytes, e.line(), e.column());
        (offset, e.to_string())
    })?;
    let mut nodes = Vec::new();
    let mut numbers = number_tokens(bytes).into_iter();
    push_json(&mut nodes, value, &mut numbers);
    Ok(nodes)
}

/// Number tokens of a JSON text in document order, as written.
fn number_tokens(bytes: &[u8]) -> Vec<&str> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += if bytes[i] == b'\\' { 2 } else { 1 };
                }
                i += 1;
            }
            b'-' | b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'-' | b'+' | b'.' | b'e' | b'E' | b'0'..=b'9') {
                    i += 1;
                }
                // tokens are ASCII
                out.push(std::str::from_utf8(&bytes[start..i]).unwrap_or_default());
            }
            _ => i += 1,
        }
    }
    out
}

fn line_column_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let line_start: usize = bytes
        .split(|b| *b == b'\n')
        .take(line.saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn push_json<'t>(nodes: &mut Vec<Node>, value: Value, numbers: &mut impl Iterator<Item = &'t str>) -> NodeId {
    let id = NodeId(nodes.len() as u32);
    nodes.push(Node::Null);
    let node = match value {
        Value::Null => Node::Null,
        Value::Bool(b) => Node::Scalar(b.to_string()),
        Value::Number(n) => {
            let normalized = n.to_string();
            // duplicate keys can desynchronize the token stream, so check
            match numbers.next() {
                Some(lex) if serde_json::from_str::<serde_json::Number>(lex).is_ok_and(|m| m == n) => {
                    Node::Scalar(lex.to_owned())
                }
                _ => Node::Scalar(normalized),
            }
        }
        Value::String(s) => Node::Scalar(s),
        Value::Array(items) => Node::Array(items.into_iter().map(|v| push_json(nodes, v, numbers)).collect()),
        Value::Object(map) => Node::Object(
            map.into_iter()
                .map(|(k, v)| {
                    let child = push_json(nodes, v, numbers);
                    (k, child)
                })
                .collect(),
        ),
    };
    nodes[id.index()] = node;
    id
}

/// Encoding named in the XML declaration, if any.
fn declared_encoding(text: &str) -> Option<&str> {
    let decl = text.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let rest = &decl[decl.find("encoding")? + "encoding".len()..];
    let rest = rest.trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next()?;
    let rest = &rest[1..];
    Some(&rest[..rest.find(quote)?])
}

fn parse_xml(bytes: &[u8]) -> Result<Vec<Node>, (usize, String)> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| (e.valid_up_to(), format!("invalid UTF-8: {e}")))?;
    if let Some(enc) = declared_encoding(text) {
        if !enc.eq_ignore_ascii_case("utf-8") && !enc.eq_ignore_ascii_case("utf8") {
            return Err((0, format!("unsupported encoding {enc}")));
        }
    }
    let options = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(text, options).map_err(|e| {
        let pos = e.pos();
        (
            line_column_offset(bytes, pos.row as usize, pos.col as usize),
            e.to_string(),
        )
    })?;
    let mut nodes = Vec::new();
    push_xml(&mut nodes, doc.root());
    Ok(nodes)
}

fn push_xml(nodes: &mut Vec<Node>, node: roxmltree::Node<'_, '_>) -> Option<NodeId> {
    let id = NodeId(nodes.len() as u32);
    let built = match node.node_type() {
        roxmltree::NodeType::Root => {
            nodes.push(Node::Null);
            Node::Document(node.children().filter_map(|c| push_xml(nodes, c)).collect())
        }
        roxmltree::NodeType::Element => {
            nodes.push(Node::Null);
            let attributes = node
                .attributes()
                .map(|a| {
                    let aid = NodeId(nodes.len() as u32);
                    nodes.push(Node::Attribute {
                        name: a.name().to_owned(),
                        value: a.value().to_owned(),
                    });
                    aid
                })
                .collect();
            let children = node.children().filter_map(|c| push_xml(nodes, c)).collect();
            Node::Element {
                name: node.tag_name().name().to_owned(),
                attributes,
                children,
            }
        }
        roxmltree::NodeType::Text => {
            nodes.push(Node::Text(node.text().unwrap_or_default().to_owned()));
            return Some(id);
        }
        roxmltree::NodeType::Comment | roxmltree::NodeType::PI => return None,
    };
    nodes[id.index()] = built;
    Some(id)
}
