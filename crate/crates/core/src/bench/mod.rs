//! Timing harness: maps generated accommodation corpora of growing size and
//! records wall time and peak memory per run.

mod alloc;
mod corpus;
mod plot;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use alloc::{peak_bytes, reset_peak, TrackingAllocator};
pub use corpus::{corpus_file_name, corpus_mapping, generate_corpus, Nesting};
pub use plot::render_svg;

use crate::engine::{run_job, EngineError, MappingJob};
use crate::mapping::parse_mapping_document;
use crate::rdf::serialize_ntriples;
use crate::source::{load_source, SourceFormat};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("object count must be at least 1")]
    EmptyCorpus,
    #[error("at least 3 repeats are required, got {0}")]
    TooFewRepeats(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerfSample {
    pub format: SourceFormat,
    pub nesting: Nesting,
    pub object_count: usize,
    pub run_index: usize,
    /// `None` when the run failed.
    pub wall_time_ms: Option<f64>,
    pub peak_memory_bytes: Option<u64>,
    pub error: Option<String>,
}

/// Median of the successful runs of one (format, size) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub format: SourceFormat,
    pub nesting: Nesting,
    pub object_count: usize,
    pub median_ms: Option<f64>,
    pub corpus_bytes: u64,
    pub triples: usize,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub formats: Vec<SourceFormat>,
    pub nesting: Nesting,
    pub repeats: usize,
    pub seed: u64,
    /// Where corpora are generated.
    pub work_dir: PathBuf,
    pub csv_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, formats: Vec<SourceFormat>, work_dir: impl Into<PathBuf>) -> Self {
        BenchConfig {
            sizes,
            formats,
            nesting: Nesting::Nested,
            repeats: 5,
            seed: 2019,
            work_dir: work_dir.into(),
            csv_path: None,
            plot_path: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub samples: Vec<PerfSample>,
    pub cells: Vec<CellSummary>,
}

impl BenchReport {
    /// Successive median ratios per format, for consecutive sizes in
    /// configuration order.
    pub fn ratios(&self, format: SourceFormat) -> Vec<f64> {
        let medians: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.format == format)
            .filter_map(|c| c.median_ms)
            .collect();
        medians.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// One end-to-end run: load the source, map it, serialize N-Triples.
fn timed_run(job: &MappingJob, source: &Path, format: SourceFormat, declared: &str) -> Result<(f64, usize), EngineError> {
    let start = Instant::now();
    let doc = load_source(source, format)?;
    let job = job.clone().with_source_document(declared, Arc::new(doc));
    let triples = run_job(&job)?;
    let bytes = serialize_ntriples(&triples);
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    std::hint::black_box(bytes);
    Ok((elapsed, triples.len()))
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Runs every (size, format) cell sequentially: one untimed warm-up, then
/// `repeats` timed runs. Engine errors are recorded as failed samples.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    if config.repeats < 3 {
        return Err(BenchError::TooFewRepeats(config.repeats));
    }
    std::fs::create_dir_all(&config.work_dir).map_err(|e| BenchError::io(&config.work_dir, e))?;
    let mut samples = Vec::new();
    let mut cells = Vec::new();
    for &format in &config.formats {
        for &n in &config.sizes {
            let path = generate_corpus(&config.work_dir, n, format, config.nesting, config.seed)?;
            let corpus_bytes = std::fs::metadata(&path).map_err(|e| BenchError::io(&path, e))?.len();
            let declared = corpus_file_name(n, format, config.nesting);
            let mapping = corpus_mapping(format, config.nesting, &declared);
            let doc = parse_mapping_document(&mapping).expect("built-in mapping parses");
            let job = MappingJob::new(doc);

            let warm_up = timed_run(&job, &path, format, &declared);
            let mut times = Vec::new();
            let mut triples = warm_up.as_ref().map(|(_, t)| *t).unwrap_or(0);
            for run_index in 0..config.repeats {
                reset_peak();
                let outcome = timed_run(&job, &path, format, &declared);
                let peak = peak_bytes();
                let sample = match outcome {
                    Ok((ms, t)) => {
                        times.push(ms);
                        triples = t;
                        PerfSample {
                            format,
                            nesting: config.nesting,
                            object_count: n,
                            run_index,
                            wall_time_ms: Some(ms),
                            peak_memory_bytes: Some(peak),
                            error: None,
                        }
                    }
                    Err(e) => PerfSample {
                        format,
                        nesting: config.nesting,
                        object_count: n,
                        run_index,
                        wall_time_ms: None,
                        peak_memory_bytes: None,
                        error: Some(e.to_string()),
                    },
                };
                samples.push(sample);
            }
            cells.push(CellSummary {
                format,
                nesting: config.nesting,
                object_count: n,
                median_ms: median(&mut times),
                corpus_bytes,
                triples,
            });
        }
    }
    let report = BenchReport { samples, cells };
    if let Some(csv_path) = &config.csv_path {
        append_csv(csv_path, &report.samples)?;
    }
    if let Some(plot_path) = &config.plot_path {
        std::fs::write(plot_path, render_svg(&report.cells)).map_err(|e| BenchError::io(plot_path, e))?;
    }
    Ok(report)
}

pub const CSV_HEADER: [&str; 6] = [
    "format",
    "nesting",
    "object_count",
    "run_index",
    "wall_time_ms",
    "peak_memory_bytes",
];

/// Appends samples to `path`, writing the header only to a new or empty file.
/// Failed runs have empty time and memory fields.
pub fn append_csv(path: &Path, samples: &[PerfSample]) -> Result<(), BenchError> {
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| BenchError::io(path, e))?;
    let empty = file.metadata().map_err(|e| BenchError::io(path, e))?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    if empty {
        w.write_record(CSV_HEADER)?;
    }
    for s in samples {
        w.write_record([
            format_name(s.format).to_owned(),
            s.nesting.to_string(),
            s.object_count.to_string(),
            s.run_index.to_string(),
            s.wall_time_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            s.peak_memory_bytes.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))?;
    Ok(())
}

pub fn format_name(format: SourceFormat) -> &'static str {
    match format {
        SourceFormat::Json => "json",
        SourceFormat::Xml => "xml",
    }
}
