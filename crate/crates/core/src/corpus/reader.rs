//! Corpus input: line-delimited JSON records or directories of raw text files.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{filter_document, segment_document, CorpusIndex, Document, FilterConfig};

const BATCH_LINES: usize = 4096;

/// One corpus record as found on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
}

pub fn parse_corpus_line(line: &str) -> std::result::Result<RawDocument, serde_json::Error> {
    serde_json::from_str(line)
}

/// A recoverable problem with one input file or line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputError {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}: line {}: {}", self.path.display(), l, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl" | "json" | "ndjson")
    )
}

/// Expands directories into their regular files, sorted by name.
fn expand_inputs(paths: &[PathBuf], errors: &mut Vec<InputError>) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            match fs::read_dir(path) {
                Ok(entries) => {
                    let mut inner: Vec<PathBuf> = entries
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|p| p.is_file())
                        .collect();
                    inner.sort();
                    files.extend(inner);
                }
                Err(e) => errors.push(InputError {
                    path: path.clone(),
                    line: None,
                    message: e.to_string(),
                }),
            }
        } else {
            files.push(path.clone());
        }
    }
    files
}

/// Streams raw documents from `paths` in batches.
///
/// Unreadable files and malformed lines are recorded in `errors` and skipped.
/// Returns the number of input bytes consumed.
pub fn read_raw_documents(
    paths: &[PathBuf],
    errors: &mut Vec<InputError>,
    mut on_batch: impl FnMut(Vec<RawDocument>),
) -> u64 {
    let mut bytes = 0u64;
    for path in expand_inputs(paths, errors) {
        let io_err = |e: std::io::Error| InputError {
            path: path.clone(),
            line: None,
            message: e.to_string(),
        };
        if !is_jsonl(&path) {
            match fs::read_to_string(&path) {
                Ok(text) => {
                    bytes += text.len() as u64;
                    let id = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    on_batch(vec![RawDocument { id, title: None, text }]);
                }
                Err(e) => errors.push(io_err(e)),
            }
            continue;
        }
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) => {
                errors.push(io_err(e));
                continue;
            }
        };
        let mut reader = BufReader::with_capacity(1 << 20, file);
        let mut batch = Vec::with_capacity(BATCH_LINES);
        let mut line = String::new();
        let mut line_no = 0;
        loop {
            line.clear();
            match reader.read_line(&mut line) {
                Ok(0) => break,
                Ok(n) => bytes += n as u64,
                Err(e) => {
                    errors.push(InputError {
                        path: path.clone(),
                        line: Some(line_no + 1),
                        message: e.to_string(),
                    });
                    break;
                }
            }
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            match parse_corpus_line(&line) {
                Ok(doc) => batch.push(doc),
                Err(e) => errors.push(InputError {
                    path: path.clone(),
                    line: Some(line_no),
                    message: e.to_string(),
                }),
            }
            if batch.len() == BATCH_LINES {
                on_batch(std::mem::replace(&mut batch, Vec::with_capacity(BATCH_LINES)));
            }
        }
        if !batch.is_empty() {
            on_batch(batch);
        }
    }
    bytes
}

/// A segmented, filtered corpus plus accounting.
#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub index: CorpusIndex,
    pub documents_read: u64,
    pub empty_documents: u64,
    pub filtered_documents: u64,
    pub duplicate_documents: u64,
    pub bytes_read: u64,
    pub errors: Vec<InputError>,
}

impl LoadedCorpus {
    pub fn documents_kept(&self) -> u64 {
        self.index.len() as u64
    }

    pub fn documents_skipped(&self) -> u64 {
        self.empty_documents + self.filtered_documents + self.duplicate_documents
    }
}

/// Reads, segments and filters every document under `paths`.
///
/// Segmentation runs on the current rayon pool. Documents are indexed by
/// doc_id; when an id repeats, the first occurrence in input order wins.
pub fn load_corpus(paths: &[PathBuf], filters: &FilterConfig) -> LoadedCorpus {
    let mut out = LoadedCorpus::default();
    let mut docs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut errors = Vec::new();
    let bytes_read = read_raw_documents(paths, &mut errors, |batch| {
        out.documents_read += batch.len() as u64;
        let processed: Vec<Option<Option<Document>>> = batch
            .par_iter()
            .map(|raw| {
                segment_document(&raw.id, raw.title.as_deref(), &raw.text)
                    .ok()
                    .map(|d| filter_document(&d, filters))
            })
            .collect();
        for (raw, result) in batch.iter().zip(processed) {
            if !seen.insert(raw.id.clone()) {
                out.duplicate_documents += 1;
                continue;
            }
            match result {
                None => out.empty_documents += 1,
                Some(None) => out.filtered_documents += 1,
                Some(Some(d)) => docs.push(d),
            }
        }
    });
    out.bytes_read = bytes_read;
    out.errors = errors;
    let (index, dups) = CorpusIndex::new(docs);
    debug_assert!(dups.is_empty());
    out.index = index;
    out
}
