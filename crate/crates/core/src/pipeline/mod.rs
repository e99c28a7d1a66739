//! Corpus → filter → sample → shard orchestration.
//!
//! Each (document, objective) pair draws from its own RNG stream seeded by
//! the global seed and the doc_id, and documents are emitted in doc_id order,
//! so shard bytes depend only on the corpus and the config.

mod validate;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{load_corpus, InputError, LoadedCorpus};
use crate::error::{Error, Result};
use crate::sampler::{build_document, BuildConfig, CorpusSampler, Objective, ObjectiveStats};
use crate::serializer::{ShardRecord, ShardWriter};

pub use validate::{
    check_record, validate_against, validate_records, validate_shards, ValidationReport, Violation, ViolationKind,
};

/// Documents handed to the worker pool per merge step.
const CHUNK_DOCS: usize = 512;

pub const STATS_FILE: &str = "stats.json";

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub out_dir: PathBuf,
    pub prefix: String,
    /// Worker threads; 0 means one per logical CPU.
    pub workers: usize,
}

impl BuildOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        BuildOptions {
            out_dir: out_dir.into(),
            prefix: "ssp".to_owned(),
            workers: 0,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.numerator as f64 / self.denominator as f64
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub documents_read: u64,
    pub documents_kept: u64,
    pub documents_skipped: u64,
    pub documents_empty: u64,
    pub documents_filtered: u64,
    pub documents_duplicate: u64,
    pub input_errors: Vec<InputError>,
    pub objectives: BTreeMap<Objective, ObjectiveStats>,
    pub hard_negative_shortfalls: u64,
    pub records_written: u64,
    pub shard_count: usize,
    /// Sentences per kept paragraph.
    pub mean_paragraph_sentence_count: Ratio,
    pub bytes_read: u64,
    pub elapsed_seconds: f64,
    pub throughput_bytes_per_second: f64,
}

impl RunStats {
    fn from_corpus(corpus: &LoadedCorpus) -> Self {
        let docs = corpus.index.documents();
        RunStats {
            documents_read: corpus.documents_read,
            documents_kept: corpus.documents_kept(),
            documents_skipped: corpus.documents_skipped(),
            documents_empty: corpus.empty_documents,
            documents_filtered: corpus.filtered_documents,
            documents_duplicate: corpus.duplicate_documents,
            input_errors: corpus.errors.clone(),
            mean_paragraph_sentence_count: Ratio {
                numerator: docs.iter().map(|d| d.sentence_count() as u64).sum(),
                denominator: docs.iter().map(|d| d.paragraphs().len() as u64).sum(),
            },
            bytes_read: corpus.bytes_read,
            ..RunStats::default()
        }
    }

    /// Records across every objective.
    pub fn total_records(&self) -> u64 {
        self.objectives.values().map(ObjectiveStats::records).sum()
    }
}

#[derive(Debug)]
pub struct BuildOutput {
    pub shards: Vec<PathBuf>,
    pub stats: RunStats,
    pub stats_path: PathBuf,
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

fn clear_stale_shards(dir: &Path, prefix: &str) -> Result<()> {
    let stem = format!("{prefix}-");
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if name.starts_with(&stem) && name.ends_with(".jsonl") {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

/// Builds SSP shards for every objective in `cfg` from the corpus under
/// `corpus_paths`, writing `<prefix>-NNNNN.jsonl` shards and `stats.json`
/// into the output directory.
pub fn run_build(corpus_paths: &[PathBuf], cfg: &BuildConfig, opts: &BuildOptions) -> Result<BuildOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let pool = thread_pool(opts.workers)?;
    let objectives = cfg.objective_set();

    let corpus = pool.install(|| load_corpus(corpus_paths, &cfg.filters));
    for e in &corpus.errors {
        log::warn!("{e}");
    }
    if corpus.index.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    log::info!(
        "corpus: {} read, {} kept, {} skipped",
        corpus.documents_read,
        corpus.documents_kept(),
        corpus.documents_skipped()
    );

    fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;
    clear_stale_shards(&opts.out_dir, &opts.prefix)?;

    let sampler = CorpusSampler::new(&corpus.index);
    let mut stats = RunStats::from_corpus(&corpus);
    for &o in &objectives {
        stats.objectives.insert(o, ObjectiveStats::default());
    }
    let mut writer = ShardWriter::<ShardRecord>::new(&opts.out_dir, opts.prefix.clone(), cfg.shard_size);

    for chunk in corpus.index.documents().chunks(CHUNK_DOCS) {
        let generated: Vec<Vec<(Objective, ObjectiveStats, Vec<ShardRecord>)>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|doc| {
                    objectives
                        .iter()
                        .map(|&o| {
                            let out = build_document(o, doc, &sampler, cfg);
                            (o, out.stats, out.examples.iter().map(ShardRecord::from).collect())
                        })
                        .collect()
                })
                .collect()
        });
        for (objective, doc_stats, records) in generated.into_iter().flatten() {
            *stats.objectives.get_mut(&objective).expect("registered above") += doc_stats;
            for r in &records {
                writer.write(r)?;
            }
            stats.records_written += records.len() as u64;
        }
    }
    let shards = writer.finish()?;

    stats.hard_negative_shortfalls = stats.objectives.values().map(|o| o.hard_negative_shortfalls).sum();
    stats.shard_count = shards.len();
    stats.elapsed_seconds = started.elapsed().as_secs_f64();
    stats.throughput_bytes_per_second = if stats.elapsed_seconds > 0.0 {
        stats.bytes_read as f64 / stats.elapsed_seconds
    } else {
        0.0
    };
    debug_assert_eq!(stats.total_records(), stats.records_written);

    let stats_path = opts.out_dir.join(STATS_FILE);
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    fs::write(&stats_path, json + "\n").map_err(|e| Error::io(&stats_path, e))?;

    Ok(BuildOutput {
        shards,
        stats,
        stats_path,
    })
}
