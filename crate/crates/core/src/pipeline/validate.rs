//! Independent re-check of shard records against the source corpus.
//!
//! Nothing here calls into the sampler: every membership and context rule is
//! re-derived from the provenance fields of the record and the re-segmented
//! corpus.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{load_corpus, CorpusIndex, FilterConfig, Paragraph};
use crate::error::Result;
use crate::sampler::{NegativeKind, Objective};
use crate::serializer::{list_shards, read_shard, ShardRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    ProvenanceUnresolvable,
    SpanOutOfRange,
    TextMismatch,
    LabelInconsistent,
    MembershipRule,
    ContextRule,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::ProvenanceUnresolvable => "provenance unresolvable",
            ViolationKind::SpanOutOfRange => "span out of range",
            ViolationKind::TextMismatch => "text mismatch",
            ViolationKind::LabelInconsistent => "label inconsistent",
            ViolationKind::MembershipRule => "membership rule",
            ViolationKind::ContextRule => "context rule",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub shard: PathBuf,
    /// 1-based line in the shard file (the header is line 1).
    pub line: usize,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.shard.display(),
            self.line,
            self.kind,
            self.message
        )
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub shards: usize,
    pub records_checked: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

type Check = std::result::Result<(), (ViolationKind, String)>;

fn fail<T>(kind: ViolationKind, message: impl Into<String>) -> std::result::Result<T, (ViolationKind, String)> {
    Err((kind, message.into()))
}

fn joined<'a>(texts: impl IntoIterator<Item = &'a str>) -> String {
    texts.into_iter().collect::<Vec<_>>().join(" ")
}

fn resolve<'a>(
    index: &'a CorpusIndex,
    doc: &str,
    par: usize,
) -> std::result::Result<&'a Paragraph, (ViolationKind, String)> {
    let Some(d) = index.get(doc) else {
        return fail(
            ViolationKind::ProvenanceUnresolvable,
            format!("document {doc:?} not in corpus"),
        );
    };
    match d.paragraphs().get(par) {
        Some(p) => Ok(p),
        None => fail(
            ViolationKind::SpanOutOfRange,
            format!(
                "document {doc:?} has {} paragraphs, record names {par}",
                d.paragraphs().len()
            ),
        ),
    }
}

/// Checks one record; returns the first rule it breaks.
pub fn check_record(rec: &ShardRecord, index: &CorpusIndex) -> Check {
    let pa = resolve(index, &rec.doc_a, rec.par_a)?;
    let pb = resolve(index, &rec.doc_b, rec.par_b)?;
    let b_lo = rec.sent_b_first;
    let b_hi = rec.sent_b_first + rec.sent_b_count;

    if rec.sent_a >= pa.len() {
        return fail(
            ViolationKind::SpanOutOfRange,
            format!("sent_a {} beyond {} sentences", rec.sent_a, pa.len()),
        );
    }
    if !(1..=3).contains(&rec.sent_b_count) || b_hi > pb.len() {
        return fail(
            ViolationKind::SpanOutOfRange,
            format!("b covers {b_lo}..{b_hi} in a paragraph of {} sentences", pb.len()),
        );
    }
    let b_sentences: Vec<&str> = pb.sentences()[b_lo..b_hi].iter().map(|s| s.text()).collect();
    if rec.a != pa.sentences()[rec.sent_a].text() {
        return fail(ViolationKind::TextMismatch, "a differs from its source sentence");
    }
    if rec.b != joined(b_sentences.iter().copied()) {
        return fail(ViolationKind::TextMismatch, "b differs from its source sentences");
    }

    let kind = match (rec.label, rec.negative_kind) {
        (1, None) => None,
        (0, Some(k)) => Some(k),
        (l, k) => {
            return fail(
                ViolationKind::LabelInconsistent,
                format!("label {l} with negative_kind {k:?}"),
            )
        }
    };

    let same_doc = rec.doc_a == rec.doc_b;
    let sdc = rec.objective == Objective::Sdc;
    match kind {
        None => {
            if !same_doc || rec.par_a != rec.par_b {
                return fail(
                    ViolationKind::MembershipRule,
                    "positive spans come from different paragraphs",
                );
            }
            if (b_lo..b_hi).contains(&rec.sent_a) {
                return fail(ViolationKind::MembershipRule, "a overlaps b");
            }
            if sdc && rec.par_a == 0 {
                return fail(
                    ViolationKind::MembershipRule,
                    "SDC positive drawn from the first paragraph",
                );
            }
        }
        Some(NegativeKind::Hard) => {
            if !same_doc || rec.par_a == rec.par_b {
                return fail(
                    ViolationKind::MembershipRule,
                    "hard negative not from another paragraph of the same document",
                );
            }
            if sdc && (rec.par_a == 0 || rec.par_b == 0) {
                return fail(
                    ViolationKind::MembershipRule,
                    "SDC hard negative touches the first paragraph",
                );
            }
        }
        Some(NegativeKind::Easy) => {
            if same_doc {
                return fail(
                    ViolationKind::MembershipRule,
                    "easy negative from the anchor's own document",
                );
            }
        }
    }

    if rec.c.is_empty() {
        return fail(ViolationKind::ContextRule, "empty context");
    }
    let expected = match rec.objective {
        Objective::Sdc => {
            let first = &index.get(&rec.doc_b).expect("resolved above").paragraphs()[0];
            joined(first.sentences().iter().map(|s| s.text()))
        }
        Objective::Dpc => {
            let skip_a = kind.is_none();
            joined(
                pb.sentences()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !(b_lo..b_hi).contains(i) && !(skip_a && *i == rec.sent_a))
                    .map(|(_, s)| s.text()),
            )
        }
        Objective::Dslc => {
            if kind.is_none() && rec.sent_a + 1 >= b_lo && rec.sent_a <= b_hi {
                return fail(ViolationKind::ContextRule, "DSLC positive anchor is adjacent to b");
            }
            let before = b_lo.checked_sub(1).map(|i| pb.sentences()[i].text());
            let after = pb.sentences().get(b_hi).map(|s| s.text());
            joined(before.into_iter().chain(after))
        }
    };
    if rec.c != expected {
        return fail(
            ViolationKind::ContextRule,
            format!("{} context does not match the corpus", rec.objective),
        );
    }
    Ok(())
}

/// Validates `records` read from `shard`. Line numbers count the header.
pub fn validate_records(shard: &Path, records: &[ShardRecord], index: &CorpusIndex) -> Vec<Violation> {
    records
        .par_iter()
        .enumerate()
        .filter_map(|(i, r)| {
            check_record(r, index).err().map(|(kind, message)| Violation {
                shard: shard.to_owned(),
                line: i + 2,
                kind,
                message,
            })
        })
        .collect()
}

/// Re-reads the corpus under `filters` and checks every record in `shards`
/// (files or directories of `.jsonl` shards).
pub fn validate_shards(
    shards: &[PathBuf],
    corpus_paths: &[PathBuf],
    filters: &FilterConfig,
) -> Result<ValidationReport> {
    let corpus = load_corpus(corpus_paths, filters);
    validate_against(shards, &corpus.index)
}

pub fn validate_against(shards: &[PathBuf], index: &CorpusIndex) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for root in shards {
        for shard in list_shards(root)? {
            let records: Vec<ShardRecord> = read_shard(&shard)?;
            report.shards += 1;
            report.records_checked += records.len() as u64;
            report.violations.extend(validate_records(&shard, &records, index));
        }
    }
    Ok(report)
}
