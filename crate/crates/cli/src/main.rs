use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rml_engine::bench::{self, BenchConfig, Nesting, TrackingAllocator};
use rml_engine::conformance::{load_corpus, render_text, run_corpus, Verdict};
use rml_engine::engine::{execute, MappingJob, OutputFormat};
use rml_engine::mapping::{parse_mapping_document, validate, Severity};
use rml_engine::SourceFormat;

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

#[derive(Parser)]
#[command(name = "rmlmap", version, about = "Map JSON and XML sources to RDF with RML mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mapping document and write the generated RDF.
    Map(MapArgs),
    /// Check a mapping document and list its diagnostics.
    Validate {
        #[arg(short, long)]
        mapping: PathBuf,
    },
    /// Run an RML test-case corpus against the expected-failure manifest.
    Conformance {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Time mapping runs over generated accommodation corpora.
    Bench(BenchArgs),
}

#[derive(clap::Args)]
struct MapArgs {
    #[arg(short, long)]
    mapping: PathBuf,
    /// Read `actual` wherever the mapping declares the source `declared`.
    #[arg(long = "input", value_name = "DECLARED=ACTUAL", value_parser = parse_override)]
    inputs: Vec<(String, PathBuf)>,
    /// Root triples map (full IRI or local name); repeatable.
    #[arg(long = "root", value_name = "ID")]
    roots: Vec<String>,
    /// Language tag added to every plain literal.
    #[arg(long)]
    lang: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Ntriples)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Directory for relative source paths [default: the mapping's directory]
    #[arg(long)]
    source_dir: Option<PathBuf>,
    /// Fail on values that do not form valid IRIs instead of skipping them.
    #[arg(long)]
    strict_iris: bool,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Object counts, e.g. `1k,10k,100k`.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_value = "1k,10k,100k")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [FormatArg::Json, FormatArg::Xml])]
    formats: Vec<FormatArg>,
    #[arg(long, default_value = "nested")]
    nesting: Nesting,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 2019)]
    seed: u64,
    /// CSV file the samples are appended to.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot of median time against object count.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Where generated corpora are written [default: a temporary directory]
    #[arg(long)]
    work_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ntriples,
    Jsonld,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Xml,
}

fn parse_override(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((declared, actual)) if !declared.is_empty() && !actual.is_empty() => {
            Ok((declared.to_owned(), PathBuf::from(actual)))
        }
        _ => Err(format!("expected DECLARED=ACTUAL, got `{s}`")),
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    let lower = s.trim().to_ascii_lowercase();
    let (digits, factor) = match lower.strip_suffix('k') {
        Some(d) => (d, 1_000),
        None => match lower.strip_suffix('m') {
            Some(d) => (d, 1_000_000),
            None => (lower.as_str(), 1),
        },
    };
    match digits.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n * factor),
        _ => Err(format!("invalid object count `{s}`")),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Map(args) => map(args),
        Command::Validate { mapping } => validate_cmd(&mapping),
        Command::Conformance { corpus, report } => conformance(&corpus, report),
        Command::Bench(args) => bench_cmd(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", error_chain(&e));
            ExitCode::from(1)
        }
    }
}

/// Joins the error chain, skipping causes already quoted by their parent.
fn error_chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut previous = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !previous.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
        previous = text;
    }
    out
}

fn read_mapping(path: &Path) -> anyhow::Result<rml_engine::MappingDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_mapping_document(&text).with_context(|| format!("{}", path.display()))
}

fn map(args: MapArgs) -> anyhow::Result<ExitCode> {
    let doc = read_mapping(&args.mapping)?;
    let source_dir = match args.source_dir {
        Some(d) => d,
        None => args
            .mapping
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let mut job = MappingJob::new(doc)
        .with_source_dir(source_dir)
        .with_strict_iris(args.strict_iris)
        .with_output_format(match args.format {
            Format::Ntriples => OutputFormat::NTriples,
            Format::Jsonld => OutputFormat::JsonLd,
        });
    for (declared, actual) in args.inputs {
        job = job.with_source_override(declared, actual);
    }
    if !args.roots.is_empty() {
        job = job.with_roots(args.roots);
    }
    if let Some(lang) = &args.lang {
        job = job.with_global_language(lang)?;
    }
    let out = execute(&job)?;
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    let bytes = out.render(job.output_format);
    match &args.output {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(mapping: &Path) -> anyhow::Result<ExitCode> {
    let doc = read_mapping(mapping)?;
    let diagnostics = validate(&doc);
    for d in &diagnostics {
        println!("{d}");
    }
    let fatal = diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
    println!(
        "{} triples maps, {} diagnostics, {fatal} errors",
        doc.triples_maps.len(),
        diagnostics.len()
    );
    Ok(if fatal == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn conformance(corpus: &Path, report: ReportFormat) -> anyhow::Result<ExitCode> {
    let cases = load_corpus(corpus)?;
    if cases.is_empty() {
        bail!("no test cases under {}", corpus.display());
    }
    let reports = run_corpus(&cases)?;
    match report {
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&reports)?),
        ReportFormat::Text => print!("{}", render_text(&reports)),
    }
    let unexpected = reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::UnexpectedFail | Verdict::UnexpectedPass));
    Ok(if unexpected { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn bench_cmd(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let formats = args
        .formats
        .iter()
        .map(|f| match f {
            FormatArg::Json => SourceFormat::Json,
            FormatArg::Xml => SourceFormat::Xml,
        })
        .collect();
    let tmp;
    let work_dir = match args.work_dir {
        Some(d) => d,
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path().to_path_buf()
        }
    };
    let mut config = BenchConfig::new(args.sizes, formats, work_dir);
    config.nesting = args.nesting;
    config.repeats = args.repeats;
    config.seed = args.seed;
    config.csv_path = args.out;
    config.plot_path = args.plot;
    let report = bench::run_benchmark(&config)?;
    println!("format nesting objects median_ms triples corpus_bytes");
    for c in &report.cells {
        println!(
            "{} {} {} {} {} {}",
            bench::format_name(c.format),
            c.nesting,
            c.object_count,
            c.median_ms.map(|m| format!("{m:.2}")).unwrap_or_else(|| "failed".into()),
            c.triples,
            c.corpus_bytes
        );
    }
    for s in report.samples.iter().filter(|s| s.error.is_some()) {
        eprintln!(
            "run {} of {} objects ({}) failed: {}",
            s.run_index,
            s.object_count,
            bench::format_name(s.format),
            s.error.as_deref().unwrap_or_default()
        );
    }
    Ok(ExitCode::SUCCESS)
}
