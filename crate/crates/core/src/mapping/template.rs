use thiserror::Error;

use super::Reference;
use crate::source::{Formulation, PathError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemplateError {
    #[error("invalid template `{template}`: {message}")]
    Syntax { template: String, message: &'static str },
    #[error("invalid reference in template `{template}`: {source}")]
    Reference {
        template: String,
        #[source]
        source: PathError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateSegment {
    Literal(String),
    Reference(Reference),
}

/// A string template with `{reference}` placeholders. `\{`, `\}` and `\\`
/// escape literal characters.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub text: String,
    pub segments: Vec<TemplateSegment>,
}

impl Template {
    pub fn parse(formulation: Formulation, text: &str) -> Result<Self, TemplateError> {
        let syntax = |message| TemplateError::Syntax {
            template: text.to_owned(),
            message,
        };
        let mut segments = Vec::new();
        let mut literal = String::new();
        let mut placeholder: Option<String> = None;
        let mut chars = text.chars();
        while let Some(c) = chars.next() {
            match (c, placeholder.as_mut()) {
                ('\\', slot) => {
                    let escaped = match chars.next() {
                        Some(e @ ('{' | '}' | '\\')) => e.to_string(),
                        Some(other) => format!("\\{other}"),
                        None => "\\".to_owned(),
                    };
                    match slot {
                        Some(p) => p.push_str(&escaped),
                        None => literal.push_str(&escaped),
                    }
                }
                ('{', None) => {
                    if !literal.is_empty() {
                        segments.push(TemplateSegment::Literal(std::mem::take(&mut literal)));
                    }
                    placeholder = Some(String::new());
                }
                ('{', Some(_)) => return Err(syntax("nested `{`")),
                ('}', None) => return Err(syntax("unbalanced `}`")),
                ('}', Some(_)) => {
                    let name = placeholder.take().unwrap_or_default();
                    if name.is_empty() {
                        return Err(syntax("empty placeholder"));
                    }
                    let reference = Reference::parse(formulation, &name).map_err(|source| {
                        TemplateError::Reference {
                            template: text.to_owned(),
                            source,
                        }
                    })?;
                    segments.push(TemplateSegment::Reference(reference));
                }
                (c, Some(p)) => p.push(c),
                (c, None) => literal.push(c),
            }
        }
        if placeholder.is_some() {
            return Err(syntax("unclosed `{`"));
        }
        if !literal.is_empty() {
            segments.push(TemplateSegment::Literal(literal));
        }
        Ok(Template {
            text: text.to_owned(),
            segments,
        })
    }

    pub fn references(&self) -> impl Iterator<Item = &Reference> {
        self.segments.iter().filter_map(|s| match s {
            TemplateSegment::Reference(r) => Some(r),
            TemplateSegment::Literal(_) => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(t: &str) -> Result<Template, TemplateError> {
        Template::parse(Formulation::JsonPath, t)
    }

    #[test]
    fn segments() {
        let t = parse("http://example.com/resource/student_{ID}").unwrap();
        assert_eq!(t.segments.len(), 2);
        assert_eq!(t.references().map(|r| r.text.as_str()).collect::<Vec<_>>(), ["ID"]);
        let t = parse("{Country Code}/{Name}").unwrap();
        assert_eq!(t.references().count(), 2);
    }

    #[test]
    fn escapes() {
        let t = parse(r"\{{Name}\}").unwrap();
        assert_eq!(t.segments[0], TemplateSegment::Literal("{".into()));
        assert_eq!(t.segments[2], TemplateSegment::Literal("}".into()));
        let t = parse(r"{a\}b}").unwrap();
        assert_eq!(t.references().next().unwrap().text, "a}b");
    }

    #[test]
    fn unbalanced() {
        for bad in ["{a", "a}", "{a{b}}", "{}"] {
            assert!(matches!(parse(bad), Err(TemplateError::Syntax { .. })), "{bad}");
        }
    }
}
