//! Runner for the RML test-case corpus with the expected-failure manifest.
//!
//! A case directory holds `mapping.ttl`, its source files and, unless the
//! case expects the mapping to be rejected, the expected `output.nq`.
//! Logical source paths in the mappings are resolved by file name inside the
//! case directory.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{execute, MappingJob};
use crate::mapping::{parse_mapping_document, Severity, UNSUPPORTED_JOIN, UNSUPPORTED_NAMED_GRAPHS};
use crate::rdf::{isomorphic, serialize_ntriples, Literal, RdfTerm, Triple, TripleSet};

pub const NO_NAMED_GRAPH_SUPPORT: &str = "No Named Graph Support";
pub const NO_JOIN_SUPPORT: &str = "No JOIN Support";

/// Cases expected not to reproduce the reference output, with the reason.
pub const EXPECTED_FAILURES: &[(&str, &str)] = &[
    ("RMLTC0006a-JSON", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0006a-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007e-JSON", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007e-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007f-JSON", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007f-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007g-JSON", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007g-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007h-JSON", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0007h-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0008a-XML", NO_NAMED_GRAPH_SUPPORT),
    ("RMLTC0009a-XML", NO_JOIN_SUPPORT),
    ("RMLTC0009b-JSON", NO_JOIN_SUPPORT),
    ("RMLTC0009b-XML", NO_JOIN_SUPPORT),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Pass,
    ExpectedFail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformanceCase {
    pub id: String,
    pub dir: PathBuf,
    pub expectation: Expectation,
    pub fail_reason: Option<String>,
}

impl ConformanceCase {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, FixtureError> {
        let dir = dir.into();
        let id = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| FixtureError::BadDirectory(dir.clone()))?
            .to_owned();
        let fail_reason = EXPECTED_FAILURES
            .iter()
            .find(|(case, _)| *case == id)
            .map(|(_, reason)| (*reason).to_owned());
        Ok(ConformanceCase {
            id,
            dir,
            expectation: if fail_reason.is_some() {
                Expectation::ExpectedFail
            } else {
                Expectation::Pass
            },
            fail_reason,
        })
    }

    pub fn mapping_path(&self) -> PathBuf {
        self.dir.join("mapping.ttl")
    }

    pub fn expected_path(&self) -> PathBuf {
        self.dir.join("output.nq")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    #[serde(rename = "ExpectedFail-Confirmed")]
    ExpectedFailConfirmed,
    UnexpectedFail,
    UnexpectedPass,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::ExpectedFailConfirmed => "ExpectedFail-Confirmed",
            Verdict::UnexpectedFail => "UnexpectedFail",
            Verdict::UnexpectedPass => "UnexpectedPass",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub diff_summary: String,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a case directory: {0}")]
    BadDirectory(PathBuf),
    #[error("{path}: expected output is not valid N-Quads: {message}")]
    ExpectedOutput { path: PathBuf, message: String },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> FixtureError + '_ {
    move |source| FixtureError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Every subdirectory of `dir` containing a `mapping.ttl`, sorted by id.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<ConformanceCase>, FixtureError> {
    let dir = dir.as_ref();
    let mut cases = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_error(dir))? {
        let path = entry.map_err(io_error(dir))?.path();
        if path.join("mapping.ttl").is_file() {
            cases.push(ConformanceCase::new(path)?);
        }
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(cases)
}

/// Reference output: default-graph triples, plus how many quads named a graph.
struct Expected {
    triples: TripleSet,
    named_graph_quads: usize,
}

fn read_expected(path: &Path) -> Result<Option<Expected>, FixtureError> {
    if !path.exists() {
        return Ok(None);
    }
    let bytes = std::fs::read(path).map_err(io_error(path))?;
    let mut triples = TripleSet::new();
    let mut named_graph_quads = 0;
    for quad in oxttl::NQuadsParser::new().for_slice(&bytes) {
        let quad = quad.map_err(|e| FixtureError::ExpectedOutput {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        if !quad.graph_name.is_default_graph() {
            named_graph_quads += 1;
            continue;
        }
        let subject = match quad.subject {
            oxrdf::NamedOrBlankNode::NamedNode(n) => RdfTerm::Iri(n.into_string()),
            oxrdf::NamedOrBlankNode::BlankNode(b) => RdfTerm::BlankNode(b.into_string()),
        };
        let object = match quad.object {
            oxrdf::Term::NamedNode(n) => RdfTerm::Iri(n.into_string()),
            oxrdf::Term::BlankNode(b) => RdfTerm::BlankNode(b.into_string()),
            oxrdf::Term::Literal(l) => RdfTerm::Literal(match l.language() {
                Some(lang) => Literal::with_language(l.value(), lang),
                None => Literal::typed(l.value(), l.datatype().as_str()),
            }),
        };
        if let Some(t) = Triple::new(subject, RdfTerm::Iri(quad.predicate.into_string()), object) {
            triples.insert(t);
        }
    }
    Ok(Some(Expected {
        triples,
        named_graph_quads,
    }))
}

/// Builds the job for a case: every logical source is read from the case
/// directory by file name.
pub fn case_job(case: &ConformanceCase) -> Result<Result<MappingJob, String>, FixtureError> {
    let path = case.mapping_path();
    let text = std::fs::read_to_string(&path).map_err(io_error(&path))?;
    let doc = match parse_mapping_document(&text) {
        Ok(doc) => doc,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let mut job = MappingJob::new(doc).with_source_dir(&case.dir);
    let declared: Vec<String> = job
        .document
        .triples_maps
        .iter()
        .map(|m| m.logical_source.source.clone())
        .collect();
    for source in declared {
        if let Some(name) = Path::new(&source).file_name() {
            let local = case.dir.join(name);
            job = job.with_source_override(source, local);
        }
    }
    Ok(Ok(job))
}

/// Known engine gaps a run ran into.
fn observed_gaps(messages: &[String], expected: Option<&Expected>) -> Vec<&'static str> {
    let mut gaps = Vec::new();
    if messages.iter().any(|m| m == UNSUPPORTED_NAMED_GRAPHS) || expected.is_some_and(|e| e.named_graph_quads > 0) {
        gaps.push(NO_NAMED_GRAPH_SUPPORT);
    }
    if messages.iter().any(|m| m == UNSUPPORTED_JOIN) {
        gaps.push(NO_JOIN_SUPPORT);
    }
    gaps
}

/// Runs one case. The output matches when it is isomorphic to the
/// reference, the reference has no named-graph quads and the engine reported
/// no unsupported constructs. A case without reference output matches when
/// the engine rejects it; an empty reference output is also matched by a
/// rejection, which produces no triples either.
pub fn run_case(case: &ConformanceCase) -> Result<CaseReport, FixtureError> {
    let expected = read_expected(&case.expected_path())?;
    let outcome = case_job(case)?.and_then(|job| execute(&job).map_err(|e| e.to_string()));

    let (matches, unsupported, diff_summary) = match (&outcome, &expected) {
        (Err(e), None) => (true, Vec::new(), format!("rejected as expected: {e}")),
        (Err(e), Some(exp)) if exp.triples.is_empty() && exp.named_graph_quads == 0 => {
            (true, Vec::new(), format!("rejected, no triples expected: {e}"))
        }
        (Err(e), Some(_)) => (false, Vec::new(), format!("engine error: {e}")),
        (Ok(out), None) => (
            false,
            unsupported_messages(out),
            format!("expected an error, got {} triples", out.triples.len()),
        ),
        (Ok(out), Some(exp)) => {
            let unsupported = unsupported_messages(out);
            let iso = isomorphic(&out.triples, &exp.triples);
            let mut summary = if iso {
                "isomorphic".to_owned()
            } else {
                diff(&out.triples, &exp.triples)
            };
            if exp.named_graph_quads > 0 {
                summary.push_str(&format!("; reference has {} named-graph quads", exp.named_graph_quads));
            }
            if !unsupported.is_empty() {
                summary.push_str(&format!("; {}", unsupported.join(", ")));
            }
            (iso && exp.named_graph_quads == 0 && unsupported.is_empty(), unsupported, summary)
        }
    };
    let gaps = observed_gaps(&unsupported, expected.as_ref());

    let (verdict, reason) = match (case.expectation, matches) {
        (Expectation::Pass, true) => (Verdict::Pass, None),
        (Expectation::Pass, false) => (
            Verdict::UnexpectedFail,
            (!gaps.is_empty()).then(|| gaps.join(", ")),
        ),
        (Expectation::ExpectedFail, true) => (Verdict::UnexpectedPass, case.fail_reason.clone()),
        (Expectation::ExpectedFail, false) => {
            if case.fail_reason.as_deref().is_some_and(|r| gaps.contains(&r)) {
                (Verdict::ExpectedFailConfirmed, case.fail_reason.clone())
            } else {
                let observed = if gaps.is_empty() {
                    "no known gap".to_owned()
                } else {
                    gaps.join(", ")
                };
                (
                    Verdict::UnexpectedFail,
                    Some(format!("expected {:?}, observed {observed}", case.fail_reason.as_deref().unwrap_or(""))),
                )
            }
        }
    };
    Ok(CaseReport {
        case: case.id.clone(),
        verdict,
        reason,
        diff_summary,
    })
}

fn unsupported_messages(out: &crate::engine::ExecutionOutput) -> Vec<String> {
    let mut messages: Vec<String> = out
        .diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Unsupported)
        .map(|d| d.message.clone())
        .collect();
    messages.dedup();
    messages
}

fn diff(actual: &TripleSet, expected: &TripleSet) -> String {
    let lines = |ts: &TripleSet| -> Vec<String> {
        String::from_utf8(serialize_ntriples(ts))
            .unwrap_or_default()
            .lines()
            .map(str::to_owned)
            .collect()
    };
    let (a, e) = (lines(actual), lines(expected));
    let missing: Vec<_> = e.iter().filter(|l| !a.contains(l)).collect();
    let extra: Vec<_> = a.iter().filter(|l| !e.contains(l)).collect();
    let mut s = format!("{} missing, {} extra", missing.len(), extra.len());
    for l in missing.iter().take(3) {
        s.push_str(&format!("\n  - {l}"));
    }
    for l in extra.iter().take(3) {
        s.push_str(&format!("\n  + {l}"));
    }
    s
}

pub fn run_corpus(cases: &[ConformanceCase]) -> Result<Vec<CaseReport>, FixtureError> {
    cases.iter().map(run_case).collect()
}

/// Counts per verdict, in `Verdict` declaration order.
pub fn summarize(reports: &[CaseReport]) -> [(Verdict, usize); 4] {
    [
        Verdict::Pass,
        Verdict::ExpectedFailConfirmed,
        Verdict::UnexpectedFail,
        Verdict::UnexpectedPass,
    ]
    .map(|v| (v, reports.iter().filter(|r| r.verdict == v).count()))
}

pub fn render_text(reports: &[CaseReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{:<18} {}", r.case, r.verdict));
        if let Some(reason) = &r.reason {
            out.push_str(&format!(" ({reason})"));
        }
        out.push('\n');
        if matches!(r.verdict, Verdict::UnexpectedFail | Verdict::UnexpectedPass) {
            for line in r.diff_summary.lines() {
                out.push_str(&format!("    {line}\n"));
            }
        }
    }
    let counts = summarize(reports)
        .iter()
        .map(|(v, n)| format!("{v}: {n}"))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("{} cases; {counts}\n", reports.len()));
    out
}
