//! Segment layouts for model inputs and the line-delimited shard format.
//!
//! Records never embed model-specific markers such as `[CLS]`/`[SEP]`; they
//! carry clean segment texts with segment ids and leave marker insertion to
//! the tokenizer:
//!
//! * pre-training: `a` → 0, `b` → 1, `c` → 2
//! * pairwise fine-tuning: `q` → 0, `s` → 1
//! * contextual fine-tuning: `q` → 0, `s` → 1, `c` → 2
//!
//! A shard file is UTF-8 JSON lines: a `{"schema": "<name>"}` header followed
//! by one record object per line.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{Label, NegativeKind, Objective, SspExample};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub text: String,
    pub segment_id: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodedRecord {
    pub segments: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl EncodedRecord {
    /// Segment ids must start at 0, never decrease, and take at most three
    /// distinct values.
    pub fn check_layout(&self) -> std::result::Result<(), String> {
        let ids: Vec<u8> = self.segments.iter().map(|s| s.segment_id).collect();
        match ids.first() {
            None => return Err("no segments".into()),
            Some(0) => {}
            Some(first) => return Err(format!("first segment id is {first}, expected 0")),
        }
        if ids.windows(2).any(|w| w[1] < w[0]) {
            return Err(format!("segment ids decrease: {ids:?}"));
        }
        if ids.iter().any(|&i| i > 2) {
            return Err(format!("segment id out of range: {ids:?}"));
        }
        if let Some(l) = self.label {
            if l > 1 {
                return Err(format!("label {l} is not 0 or 1"));
            }
        }
        Ok(())
    }

    /// Characters across all segments, an advisory budget for truncation.
    pub fn char_budget(&self) -> usize {
        self.segments.iter().map(|s| s.text.chars().count()).sum()
    }
}

fn segments<const N: usize>(texts: [&str; N]) -> Vec<Segment> {
    texts
        .into_iter()
        .zip(0u8..)
        .map(|(t, id)| Segment {
            text: t.to_owned(),
            segment_id: id,
        })
        .collect()
}

/// Lays out an SSP triple as segments `(a, 0), (b, 1), (c, 2)`.
///
/// Panics if `c` is empty; the sampler never emits such examples.
pub fn encode_pretrain(ex: &SspExample) -> EncodedRecord {
    ShardRecord::from(ex).encode()
}

/// A downstream answer-selection input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineTuneRecord {
    pub question_id: String,
    pub question: String,
    pub candidate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodeMode {
    Pairwise,
    Contextual,
}

impl std::str::FromStr for EncodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(EncodeMode::Pairwise),
            "contextual" => Ok(EncodeMode::Contextual),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// `(q, 0), (s, 1)` in pairwise mode; `(q, 0), (s, 1), (c, 2)` in contextual mode.
pub fn encode_finetune(rec: &FineTuneRecord, mode: EncodeMode) -> Result<EncodedRecord> {
    if rec.question.is_empty() || rec.candidate.is_empty() {
        return Err(Error::InvalidRecord(format!(
            "question {}: empty question or candidate",
            rec.question_id
        )));
    }
    if rec.label > 1 {
        return Err(Error::InvalidRecord(format!(
            "question {}: label {} is not 0 or 1",
            rec.question_id, rec.label
        )));
    }
    let segments = match mode {
        EncodeMode::Pairwise => segments([&rec.question, &rec.candidate]),
        EncodeMode::Contextual => {
            let c = rec.context.as_deref().ok_or_else(|| Error::MissingContext {
                question_id: rec.question_id.clone(),
            })?;
            segments([&rec.question, &rec.candidate, c])
        }
    };
    let mut metadata = BTreeMap::new();
    metadata.insert("question_id".to_owned(), rec.question_id.clone());
    let mut out = EncodedRecord {
        segments,
        label: Some(rec.label),
        objective: None,
        metadata,
    };
    out.metadata
        .insert("char_budget".to_owned(), out.char_budget().to_string());
    Ok(out)
}

/// On-disk form of one SSP example. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShardRecord {
    pub objective: Objective,
    pub label: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_kind: Option<NegativeKind>,
    pub a: String,
    pub b: String,
    pub c: String,
    pub doc_a: String,
    pub doc_b: String,
    pub par_a: usize,
    pub par_b: usize,
    pub sent_a: usize,
    pub sent_b_first: usize,
    pub sent_b_count: usize,
}

impl From<&SspExample> for ShardRecord {
    fn from(ex: &SspExample) -> Self {
        ShardRecord {
            objective: ex.objective,
            label: ex.label.as_int(),
            negative_kind: ex.negative_kind,
            a: ex.a.text.clone(),
            b: ex.b.text.clone(),
            c: ex.c.clone(),
            doc_a: ex.a.doc_id.clone(),
            doc_b: ex.b.doc_id.clone(),
            par_a: ex.a.paragraph_index,
            par_b: ex.b.paragraph_index,
            sent_a: ex.a.first_sentence,
            sent_b_first: ex.b.first_sentence,
            sent_b_count: ex.b.sentence_count,
        }
    }
}

impl ShardRecord {
    pub fn label(&self) -> Label {
        if self.label == 1 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    /// The three-segment pre-training layout.
    pub fn encode(&self) -> EncodedRecord {
        assert!(!self.c.is_empty(), "pre-training context must be non-empty");
        let mut metadata = BTreeMap::new();
        metadata.insert("doc_a".to_owned(), self.doc_a.clone());
        metadata.insert("doc_b".to_owned(), self.doc_b.clone());
        metadata.insert("par_a".to_owned(), self.par_a.to_string());
        metadata.insert("par_b".to_owned(), self.par_b.to_string());
        metadata.insert("sent_a".to_owned(), self.sent_a.to_string());
        metadata.insert("sent_b_first".to_owned(), self.sent_b_first.to_string());
        metadata.insert("sent_b_count".to_owned(), self.sent_b_count.to_string());
        if let Some(kind) = self.negative_kind {
            let kind = match kind {
                NegativeKind::Hard => "hard",
                NegativeKind::Easy => "easy",
            };
            metadata.insert("negative_kind".to_owned(), kind.to_owned());
        }
        let mut out = EncodedRecord {
            segments: segments([&self.a, &self.b, &self.c]),
            label: Some(self.label),
            objective: Some(self.objective),
            metadata,
        };
        out.metadata
            .insert("char_budget".to_owned(), out.char_budget().to_string());
        out
    }
}

/// A record type that can live in a shard file.
pub trait ShardSchema: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;

    fn check(&self) -> std::result::Result<(), String> {
        Ok(())
    }
}

impl ShardSchema for ShardRecord {
    const SCHEMA: &'static str = "ssp-v1";

    fn check(&self) -> std::result::Result<(), String> {
        if self.label > 1 {
            return Err(format!("label {} is not 0 or 1", self.label));
        }
        Ok(())
    }
}

impl ShardSchema for EncodedRecord {
    const SCHEMA: &'static str = "as2-ft-v1";

    fn check(&self) -> std::result::Result<(), String> {
        self.check_layout()
    }
}

pub fn schema_header(schema: &str) -> String {
    format!("{{\"schema\": \"{schema}\"}}")
}

/// `<prefix>-<index>.jsonl` with a five-digit zero-padded index.
pub fn shard_file_name(prefix: &str, index: usize) -> String {
    format!("{prefix}-{index:05}.jsonl")
}

fn write_record<R: Serialize, W: Write>(out: &mut W, record: &R) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}

pub fn write_shard<R: ShardSchema>(records: &[R], path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "{}", schema_header(R::SCHEMA)).map_err(io)?;
    for r in records {
        write_record(&mut out, r).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[derive(Deserialize)]
struct Header {
    schema: String,
}

/// Parses shard content; `path` only labels errors.
pub fn read_shard_from<R: ShardSchema>(reader: impl BufRead, path: &Path) -> Result<Vec<R>> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        None => return Err(Error::malformed(path, 1, "missing schema header")),
        Some(l) => l.map_err(|e| Error::malformed(path, 1, e))?,
    };
    let header: Header =
        serde_json::from_str(&header).map_err(|e| Error::malformed(path, 1, format!("bad schema header: {e}")))?;
    if header.schema != R::SCHEMA {
        return Err(Error::SchemaMismatch {
            path: path.to_owned(),
            expected: R::SCHEMA,
            found: header.schema,
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::malformed(path, line_no, e))?;
        let record: R = serde_json::from_str(&line).map_err(|e| Error::malformed(path, line_no, e))?;
        record.check().map_err(|e| Error::malformed(path, line_no, e))?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_shard<R: ShardSchema>(path: &Path) -> Result<Vec<R>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_shard_from(BufReader::new(file), path)
}

/// Shard files under `path` (or `path` itself when it is a file), sorted.
pub fn list_shards(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_owned()]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    out.sort();
    Ok(out)
}

/// Appends records to `<prefix>-NNNNN.jsonl` files, starting a new file every
/// `shard_size` records.
pub struct ShardWriter<R> {
    dir: PathBuf,
    prefix: String,
    shard_size: usize,
    current: Option<(BufWriter<File>, usize)>,
    paths: Vec<PathBuf>,
    _record: std::marker::PhantomData<fn(&R)>,
}

impl<R: ShardSchema> ShardWriter<R> {
    pub fn new(dir: impl Into<PathBuf>, prefix: impl Into<String>, shard_size: usize) -> Self {
        ShardWriter {
            dir: dir.into(),
            prefix: prefix.into(),
            shard_size: shard_size.max(1),
            current: None,
            paths: Vec::new(),
            _record: std::marker::PhantomData,
        }
    }

    fn open_next(&mut self) -> Result<()> {
        self.finish_current()?;
        let path = self.dir.join(shard_file_name(&self.prefix, self.paths.len()));
        let mut w = BufWriter::with_capacity(1 << 20, File::create(&path).map_err(|e| Error::io(&path, e))?);
        writeln!(w, "{}", schema_header(R::SCHEMA)).map_err(|e| Error::io(&path, e))?;
        self.paths.push(path);
        self.current = Some((w, 0));
        Ok(())
    }

    fn finish_current(&mut self) -> Result<()> {
        if let Some((mut w, _)) = self.current.take() {
            let path = self.paths.last().expect("open shard has a path");
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }

    pub fn write(&mut self, record: &R) -> Result<()> {
        if self.current.as_ref().is_none_or(|(_, n)| *n >= self.shard_size) {
            self.open_next()?;
        }
        let (w, n) = self.current.as_mut().expect("shard opened above");
        let path = self.paths.last().expect("open shard has a path");
        write_record(w, record).map_err(|e| Error::io(path, e))?;
        *n += 1;
        Ok(())
    }

    /// Flushes and returns every shard written. An empty run still produces
    /// one header-only shard.
    pub fn finish(mut self) -> Result<Vec<PathBuf>> {
        if self.paths.is_empty() {
            self.open_next()?;
        }
        self.finish_current()?;
        Ok(self.paths)
    }
}
