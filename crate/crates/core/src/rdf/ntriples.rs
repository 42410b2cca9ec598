use std::fmt::Write as _;
use std::io::{self, Write};

use super::{RdfTerm, TripleSet};

/// Serializes to canonical N-Triples: one triple per line, `\n` line ends.
pub fn serialize_ntriples(ts: &TripleSet) -> Vec<u8> {
    let mut out = Vec::new();
    write_ntriples(ts, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn write_ntriples(ts: &TripleSet, mut w: impl Write) -> io::Result<()> {
    let mut line = String::new();
    for t in ts {
        line.clear();
        write_term(&mut line, &t.subject);
        line.push(' ');
        write_term(&mut line, &t.predicate);
        line.push(' ');
        write_term(&mut line, &t.object);
        line.push_str(" .\n");
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub(crate) fn write_term(out: &mut String, term: &RdfTerm) {
    match term {
        RdfTerm::Iri(iri) => {
            out.push('<');
            for c in iri.chars() {
                match c {
                    '\0'..=' ' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                        let _ = write!(out, "\\u{:04X}", c as u32);
                    }
                    _ => out.push(c),
                }
            }
            out.push('>');
        }
        RdfTerm::BlankNode(label) => {
            out.push_str("_:");
            out.push_str(label);
        }
        RdfTerm::Literal(lit) => {
            out.push('"');
            for c in lit.lexical().chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    '\u{8}' => out.push_str("\\b"),
                    '\u{c}' => out.push_str("\\f"),
                    '\0'..='\u{1f}' | '\u{7f}' => {
                        let _ = write!(out, "\\u{:04X}", c as u32);
                    }
                    _ => out.push(c),
                }
            }
            out.push('"');
            if let Some(lang) = lit.language() {
                out.push('@');
                out.push_str(lang);
            } else if let Some(dt) = lit.datatype() {
                out.push_str("^^");
                write_term(out, &RdfTerm::Iri(dt.to_owned()));
            }
        }
    }
}
