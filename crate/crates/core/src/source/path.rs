//! JSONPath and XPath subsets used for iterators and references.
//!
//! JSONPath: `$`, `.name`, `['name']`, `.*`, `[*]` and non-negative `[n]`.
//! XPath: child steps with name or `*` tests, `@attr`, `text()` and a single
//! positional predicate `[k]` (1-based). Both languages only walk downwards,
//! which makes prefix comparison of step lists a sound way to derive the
//! iterator of a nested map relative to its enclosing map.

use std::fmt;

use thiserror::Error;

use super::{Node, NodeId, SourceDocument, SourceFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    JsonPath,
    XPath,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::JsonPath => "JSONPath",
            Formulation::XPath => "XPath",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("unsupported {formulation} feature in `{expr}`: {feature}")]
    Unsupported {
        formulation: Formulation,
        expr: String,
        feature: &'static str,
    },
    #[error("invalid {formulation} expression `{expr}`: {message}")]
    Syntax {
        formulation: Formulation,
        expr: String,
        message: String,
    },
    #[error("expression `{expr}` cannot be evaluated against a {format:?} document")]
    FormulationMismatch { expr: String, format: SourceFormat },
    #[error("expected a relative expression, got `{expr}`")]
    ExpectedRelative { expr: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("iterator `{child}` does not extend iterator `{parent}` step-wise")]
pub struct NotAPrefix {
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Step {
    /// Named child (JSON member, XML element), or any child when `name` is `None`.
    Child {
        name: Option<String>,
        position: Option<usize>,
    },
    /// JSON array index (0-based).
    Index(usize),
    Attribute(String),
    Text { position: Option<usize> },
}

#[derive(Debug, Clone)]
pub struct PathExpression {
    formulation: Formulation,
    text: String,
    is_relative: bool,
    steps: Vec<Step>,
    /// Source spelling of each step, used to render derived expressions.
    raw: Vec<String>,
}

impl PartialEq for PathExpression {
    fn eq(&self, other: &Self) -> bool {
        self.formulation == other.formulation
            && self.is_relative == other.is_relative
            && self.steps == other.steps
    }
}

impl Eq for PathExpression {}

impl fmt::Display for PathExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl PathExpression {
    /// Parses an absolute or relative expression; JSONPath expressions are
    /// absolute iff they start with `$`, XPath ones iff they start with `/`.
    pub fn parse(formulation: Formulation, text: &str) -> Result<Self, PathError> {
        let (steps, raw, is_relative) = match formulation {
            Formulation::JsonPath => parse_jsonpath(text)?,
            Formulation::XPath => parse_xpath(text)?,
        };
        Ok(PathExpression {
            formulation,
            text: text.to_owned(),
            is_relative,
            steps,
            raw,
        })
    }

    pub fn parse_relative(formulation: Formulation, text: &str) -> Result<Self, PathError> {
        let expr = Self::parse(formulation, text)?;
        if !expr.is_relative {
            return Err(PathError::ExpectedRelative {
                expr: text.to_owned(),
            });
        }
        Ok(expr)
    }

    /// The empty relative path, selecting the context node itself.
    pub fn current(formulation: Formulation) -> Self {
        PathExpression {
            formulation,
            text: String::new(),
            is_relative: true,
            steps: Vec::new(),
            raw: Vec::new(),
        }
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn is_relative(&self) -> bool {
        self.is_relative
    }

    /// True for the relative path that selects the context node itself.
    pub fn is_current(&self) -> bool {
        self.is_relative && self.steps.is_empty()
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

/// Derives the iterator of a nested map relative to the nodes selected by the
/// enclosing map's iterator. `child` must start with all steps of `parent`;
/// the remaining steps form the relative expression.
pub fn compute_relative_iterator(
    parent: &PathExpression,
    child: &PathExpression,
) -> Result<PathExpression, NotAPrefix> {
    let not_a_prefix = || NotAPrefix {
        parent: parent.text.clone(),
        child: child.text.clone(),
    };
    if parent.is_relative
        || child.is_relative
        || parent.formulation != child.formulation
        || !child.steps.starts_with(&parent.steps)
    {
        return Err(not_a_prefix());
    }
    let n = parent.steps.len();
    let raw = child.raw[n..].to_vec();
    let text = match child.formulation {
        Formulation::JsonPath => {
            let joined = raw.concat();
            joined.strip_prefix('.').map(str::to_owned).unwrap_or(joined)
        }
        Formulation::XPath => raw.join("/"),
    };
    Ok(PathExpression {
        formulation: child.formulation,
        text,
        is_relative: true,
        steps: child.steps[n..].to_vec(),
        raw,
    })
}

type Parsed = (Vec<Step>, Vec<String>, bool);

fn parse_jsonpath(text: &str) -> Result<Parsed, PathError> {
    let unsupported = |feature| PathError::Unsupported {
        formulation: Formulation::JsonPath,
        expr: text.to_owned(),
        feature,
    };
    let syntax = |message: &str| PathError::Syntax {
        formulation: Formulation::JsonPath,
        expr: text.to_owned(),
        message: message.to_owned(),
    };

    let mut steps = Vec::new();
    let mut raw = Vec::new();
    let (is_relative, mut rest) = match text.strip_prefix('$') {
        Some(r) => (false, r),
        None => (true, text),
    };
    if is_relative {
        if rest.starts_with('@') {
            return Err(unsupported("current-node `@` expressions"));
        }
        if !rest.is_empty() && !rest.starts_with('[') {
            // a relative path starts with a bare member name
            let end = rest.find(['.', '[']).unwrap_or(rest.len());
            let name = &rest[..end];
            if name.is_empty() {
                return Err(syntax("empty member name"));
            }
            steps.push(name_step(name));
            raw.push(name.to_owned());
            rest = &rest[end..];
        }
    }

    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('.') {
            if after.starts_with('.') {
                return Err(unsupported("recursive descent `..`"));
            }
            if after.starts_with('[') {
                return Err(syntax("`.` followed by `[`"));
            }
            let end = after.find(['.', '[']).unwrap_or(after.len());
            let name = &after[..end];
            if name.is_empty() {
                return Err(syntax("empty member name"));
            }
            if name.contains('(') {
                return Err(unsupported("functions"));
            }
            steps.push(name_step(name));
            raw.push(format!(".{name}"));
            rest = &after[end..];
        } else if let Some(after) = rest.strip_prefix('[') {
            let (inner, consumed) = bracket_content(after).ok_or_else(|| syntax("unclosed `[`"))?;
            let inner_trim = inner.trim();
            let step = if inner_trim == "*" {
                Step::Child {
                    name: None,
                    position: None,
                }
            } else if inner_trim.starts_with('?') {
                return Err(unsupported("filter expressions"));
            } else if inner_trim.starts_with('(') {
                return Err(unsupported("script expressions"));
            } else if let Some(name) = quoted(inner_trim) {
                Step::Child {
                    name: Some(name),
                    position: None,
                }
            } else if inner_trim.contains(',') {
                return Err(unsupported("unions"));
            } else if inner_trim.contains(':') {
                return Err(unsupported("array slices"));
            } else if inner_trim.starts_with('-') {
                return Err(unsupported("negative array indices"));
            } else if let Ok(i) = inner_trim.parse::<usize>() {
                Step::Index(i)
            } else {
                return Err(syntax("bracket must hold `*`, a quoted name or an index"));
            };
            steps.push(step);
            raw.push(format!("[{inner}]"));
            rest = &after[consumed..];
        } else {
            return Err(syntax("expected `.` or `[`"));
        }
    }
    Ok((steps, raw, is_relative))
}

fn name_step(name: &str) -> Step {
    Step::Child {
        name: (name != "*").then(|| name.to_owned()),
        position: None,
    }
}

/// Returns the bracket body and the number of bytes consumed including `]`.
fn bracket_content(s: &str) -> Option<(&str, usize)> {
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        match quote {
            Some(q) => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    quote = None;
                }
            }
            None => match c {
                '\'' | '"' => quote = Some(c),
                ']' => return Some((&s[..i], i + 1)),
                _ => {}
            },
        }
    }
    None
}

fn quoted(s: &str) -> Option<String> {
    let q = s.chars().next().filter(|c| *c == '\'' || *c == '"')?;
    let body = s.strip_prefix(q)?.strip_suffix(q)?;
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(chars.next()?);
        } else {
            out.push(c);
        }
    }
    Some(out)
}

fn parse_xpath(text: &str) -> Result<Parsed, PathError> {
    let unsupported = |feature| PathError::Unsupported {
        formulation: Formulation::XPath,
        expr: text.to_owned(),
        feature,
    };
    let syntax = |message: &str| PathError::Syntax {
        formulation: Formulation::XPath,
        expr: text.to_owned(),
        message: message.to_owned(),
    };

    if text.starts_with("//") {
        return Err(unsupported("descendant axis `//`"));
    }
    let (is_relative, rest) = match text.strip_prefix('/') {
        Some(r) => (false, r),
        None => (true, text),
    };
    let mut steps = Vec::new();
    let mut raw = Vec::new();
    if rest.is_empty() {
        return Ok((steps, raw, is_relative));
    }
    for segment in rest.split('/') {
        if let Some(last) = steps.last() {
            if matches!(last, Step::Attribute(_) | Step::Text { .. }) {
                return Err(syntax("attribute and text() steps must be last"));
            }
        }
        let seg = segment.trim();
        if seg.is_empty() {
            return Err(unsupported("descendant axis `//`"));
        }
        if seg.contains("::") {
            return Err(unsupported("explicit axes"));
        }
        if seg == "." || seg == ".." {
            return Err(unsupported("self and parent steps"));
        }
        let (test, position) = match seg.find('[') {
            Some(open) => {
                let inner = seg[open + 1..]
                    .strip_suffix(']')
                    .ok_or_else(|| syntax("unclosed `[`"))?;
                if inner.contains('[') || inner.contains(']') {
                    return Err(unsupported("multiple predicates"));
                }
                match inner.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => (&seg[..open], Some(k)),
                    Ok(_) => return Err(syntax("positions start at 1")),
                    Err(_) => return Err(unsupported("non-positional predicates")),
                }
            }
            None => (seg, None),
        };
        let step = if let Some(attr) = test.strip_prefix('@') {
            if position.is_some() {
                return Err(unsupported("predicates on attribute steps"));
            }
            if attr == "*" {
                return Err(unsupported("attribute wildcards"));
            }
            check_xml_name(attr).map_err(syntax)?;
            Step::Attribute(local_name(attr).to_owned())
        } else if test == "text()" {
            Step::Text { position }
        } else if test.contains('(') {
            return Err(unsupported("functions"));
        } else if test == "*" {
            Step::Child {
                name: None,
                position,
            }
        } else {
            check_xml_name(test).map_err(syntax)?;
            Step::Child {
                name: Some(local_name(test).to_owned()),
                position,
            }
        };
        steps.push(step);
        raw.push(seg.to_owned());
    }
    Ok((steps, raw, is_relative))
}

fn check_xml_name(name: &str) -> Result<(), &'static str> {
    if name.is_empty() {
        return Err("empty name test");
    }
    if name
        .chars()
        .any(|c| c.is_whitespace() || "[]()@=<>'\",|!*$".contains(c))
    {
        return Err("invalid character in name test");
    }
    Ok(())
}

fn local_name(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

pub(crate) fn select(doc: &SourceDocument, start: NodeId, expr: &PathExpression) -> Vec<NodeId> {
    let mut current = vec![start];
    let mut next = Vec::new();
    for step in &expr.steps {
        next.clear();
        for &n in &current {
            apply(doc, n, step, &mut next);
        }
        std::mem::swap(&mut current, &mut next);
        if current.is_empty() {
            break;
        }
    }
    current
}

fn apply(doc: &SourceDocument, node: NodeId, step: &Step, out: &mut Vec<NodeId>) {
    match (doc.node(node), step) {
        (Node::Object(members), Step::Child { name: Some(n), .. }) => {
            out.extend(members.iter().filter(|(k, _)| k == n).map(|(_, id)| *id))
        }
        (Node::Object(members), Step::Child { name: None, .. }) => {
            out.extend(members.iter().map(|(_, id)| *id))
        }
        (Node::Array(items), Step::Child { name: None, .. }) => out.extend(items.iter().copied()),
        (Node::Array(items), Step::Index(i)) => out.extend(items.get(*i).copied()),
        (Node::Document(children) | Node::Element { children, .. }, Step::Child { name, position }) => {
            let matching = children.iter().copied().filter(|c| match doc.node(*c) {
                Node::Element { name: en, .. } => name.as_ref().is_none_or(|n| n == en),
                _ => false,
            });
            push_positioned(matching, *position, out);
        }
        (Node::Element { children, .. }, Step::Text { position }) => {
            let matching = children
                .iter()
                .copied()
                .filter(|c| matches!(doc.node(*c), Node::Text(_)));
            push_positioned(matching, *position, out);
        }
        (Node::Element { attributes, .. }, Step::Attribute(name)) => out.extend(
            attributes
                .iter()
                .copied()
                .filter(|a| matches!(doc.node(*a), Node::Attribute { name: an, .. } if an == name)),
        ),
        _ => {}
    }
}

fn push_positioned(matching: impl Iterator<Item = NodeId>, position: Option<usize>, out: &mut Vec<NodeId>) {
    match position {
        Some(k) => out.extend(matching.skip(k - 1).take(1)),
        None => out.extend(matching),
    }
}
