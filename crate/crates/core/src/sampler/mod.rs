//! SSP example generation under the SDC, DPC and DSLC objectives.
//!
//! Every objective pairs a single-sentence anchor `a` with a 1–3 sentence span
//! `b` and a context `c`:
//!
//! * positives draw `a` and `b` from one paragraph of the document,
//! * hard negatives keep `a` and draw `b` from another paragraph of the same
//!   document,
//! * easy negatives keep `a` and draw `b` from a paragraph of another document.
//!
//! The objectives differ in where positives may come from and how `c` is
//! chosen:
//!
//! | objective | positive paragraph          | context `c`                         |
//! |-----------|-----------------------------|-------------------------------------|
//! | SDC       | `P_i`, `i > 0`              | first paragraph of `b`'s document   |
//! | DPC       | any `P_i`                   | `b`'s paragraph minus `a` and `b`   |
//! | DSLC      | any `P_i`, `a` not next to `b` | sentences just before/after `b`  |

mod spans;

use std::fmt;
use std::ops::{AddAssign, Range};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{CorpusIndex, Document, FilterConfig, Paragraph};
use crate::error::{Error, Result};

pub use spans::MAX_B_SENTENCES;
use spans::{draw_pair, draw_span, span_text};

/// RNG used for every sampling decision.
pub type SampleRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sdc,
    Dpc,
    Dslc,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Sdc, Objective::Dpc, Objective::Dslc];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Sdc => "sdc",
            Objective::Dpc => "dpc",
            Objective::Dslc => "dslc",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }

    /// Whether a paragraph can host a positive `(a, b)` pair.
    pub fn hosts_positive(self, paragraph: &Paragraph) -> bool {
        match self {
            Objective::Sdc => paragraph.index_in_document() > 0 && paragraph.len() >= 2,
            Objective::Dpc | Objective::Dslc => paragraph.len() >= 3,
        }
    }

    /// Whether a paragraph can supply a negative `b` with a non-empty context.
    pub fn hosts_negative(self, paragraph: &Paragraph) -> bool {
        match self {
            Objective::Sdc => true,
            Objective::Dpc | Objective::Dslc => paragraph.len() >= 2,
        }
    }

    fn max_negative_len(self, paragraph: &Paragraph) -> usize {
        let n = paragraph.len();
        match self {
            Objective::Sdc => n.min(MAX_B_SENTENCES),
            Objective::Dpc | Objective::Dslc => (n - 1).min(MAX_B_SENTENCES),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sdc" => Ok(Objective::Sdc),
            "dpc" => Ok(Objective::Dpc),
            "dslc" => Ok(Objective::Dslc),
            other => Err(Error::Config(format!("unknown objective {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_int(self) -> u8 {
        match self {
            Label::Positive => 1,
            Label::Negative => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeKind {
    Hard,
    Easy,
}

/// One to three contiguous sentences of one paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub doc_id: String,
    pub paragraph_index: usize,
    pub first_sentence: usize,
    pub sentence_count: usize,
    pub text: String,
}

impl Span {
    fn new(doc: &Document, paragraph: &Paragraph, sentences: Range<usize>) -> Self {
        Span {
            doc_id: doc.doc_id().to_owned(),
            paragraph_index: paragraph.index_in_document(),
            first_sentence: sentences.start,
            sentence_count: sentences.len(),
            text: span_text(paragraph, sentences),
        }
    }

    pub fn sentences(&self) -> Range<usize> {
        self.first_sentence..self.first_sentence + self.sentence_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SspExample {
    pub objective: Objective,
    pub a: Span,
    pub b: Span,
    pub c: String,
    pub label: Label,
    pub negative_kind: Option<NegativeKind>,
}

impl SspExample {
    pub fn source_doc_a(&self) -> &str {
        &self.a.doc_id
    }

    pub fn source_doc_b(&self) -> &str {
        &self.b.doc_id
    }
}

/// Every sampling knob of a build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub objectives: Vec<Objective>,
    pub seed: u64,
    pub max_hard_negatives: usize,
    pub total_negatives: usize,
    pub positives_per_paragraph: usize,
    pub shard_size: usize,
    pub filters: FilterConfig,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            objectives: Objective::ALL.to_vec(),
            seed: 0,
            max_hard_negatives: 2,
            total_negatives: 4,
            positives_per_paragraph: 1,
            shard_size: 100_000,
            filters: FilterConfig::default(),
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.objectives.is_empty() {
            return Err(Error::Config("no objective selected".into()));
        }
        if self.max_hard_negatives > self.total_negatives {
            return Err(Error::Config(format!(
                "max_hard_negatives ({}) exceeds total_negatives ({})",
                self.max_hard_negatives, self.total_negatives
            )));
        }
        if self.shard_size == 0 {
            return Err(Error::Config("shard_size must be positive".into()));
        }
        Ok(())
    }

    /// Objectives in canonical order with duplicates removed.
    pub fn objective_set(&self) -> Vec<Objective> {
        let mut v = self.objectives.clone();
        v.sort();
        v.dedup();
        v
    }
}

/// RNG stream for one (seed, objective, document), independent of scheduling.
pub fn document_rng(seed: u64, objective: Objective, doc_id: &str) -> SampleRng {
    let mut h = Sha256::new();
    h.update(b"ssp-forge/doc-rng/v1\0");
    h.update(seed.to_le_bytes());
    h.update(objective.as_str().as_bytes());
    h.update([0u8]);
    h.update(doc_id.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    SampleRng::from_seed(digest)
}

/// Read-only index used to draw easy negatives uniformly over documents.
pub struct CorpusSampler<'a> {
    index: &'a CorpusIndex,
    // Per objective: positions of documents with at least one paragraph able
    // to supply a negative, ascending.
    pools: [Vec<usize>; 3],
}

impl<'a> CorpusSampler<'a> {
    pub fn new(index: &'a CorpusIndex) -> Self {
        let pools = Objective::ALL.map(|obj| {
            index
                .documents()
                .iter()
                .enumerate()
                .filter(|(_, d)| d.paragraphs().iter().any(|p| obj.hosts_negative(p)))
                .map(|(i, _)| i)
                .collect()
        });
        CorpusSampler { index, pools }
    }

    pub fn index(&self) -> &'a CorpusIndex {
        self.index
    }

    /// Number of documents that can supply an easy negative for `objective`.
    pub fn pool_len(&self, objective: Objective) -> usize {
        self.pools[objective.slot()].len()
    }
}

/// Draws an anchor sentence `a` and a disjoint span `b` from one paragraph.
pub fn sample_anchor_pair<R: Rng + ?Sized>(doc: &Document, paragraph: &Paragraph, rng: &mut R) -> Result<(Span, Span)> {
    let (a, b) = draw_pair(paragraph.len(), 0, MAX_B_SENTENCES, rng).ok_or(Error::ParagraphTooShort {
        sentences: paragraph.len(),
        needed: 2,
    })?;
    Ok((Span::new(doc, paragraph, a..a + 1), Span::new(doc, paragraph, b)))
}

fn sdc_context(doc: &Document) -> String {
    doc.paragraphs()[0].text()
}

/// Sentences of `paragraph` outside every range in `excluded`, space-joined.
fn dpc_context(paragraph: &Paragraph, excluded: &[Range<usize>]) -> String {
    let mut out = String::new();
    for s in paragraph.sentences() {
        let i = s.index_in_paragraph();
        if excluded.iter().any(|r| r.contains(&i)) {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(s.text());
    }
    out
}

/// The sentence before and the sentence after `b`, when present.
fn dslc_context(paragraph: &Paragraph, b: &Range<usize>) -> String {
    let before = b.start.checked_sub(1);
    let after = (b.end < paragraph.len()).then_some(b.end);
    let s = paragraph.sentences();
    match (before, after) {
        (Some(p), Some(n)) => format!("{} {}", s[p].text(), s[n].text()),
        (Some(p), None) => s[p].text().to_owned(),
        (None, Some(n)) => s[n].text().to_owned(),
        (None, None) => String::new(),
    }
}

fn negative_context(objective: Objective, doc: &Document, paragraph: &Paragraph, b: &Range<usize>) -> String {
    match objective {
        Objective::Sdc => sdc_context(doc),
        Objective::Dpc => dpc_context(paragraph, std::slice::from_ref(b)),
        Objective::Dslc => dslc_context(paragraph, b),
    }
}

fn draw_negative_b<R: Rng + ?Sized>(
    objective: Objective,
    doc: &Document,
    paragraph: &Paragraph,
    rng: &mut R,
) -> (Span, String) {
    let range = draw_span(paragraph.len(), objective.max_negative_len(paragraph), rng);
    let c = negative_context(objective, doc, paragraph, &range);
    (Span::new(doc, paragraph, range), c)
}

/// Draws `b` from a uniformly chosen document other than `exclude_doc_id`,
/// with the context `objective` prescribes for it.
pub fn sample_easy_negative<R: Rng + ?Sized>(
    corpus: &CorpusSampler<'_>,
    exclude_doc_id: &str,
    objective: Objective,
    rng: &mut R,
) -> Result<(Span, String)> {
    let pool = &corpus.pools[objective.slot()];
    let excluded_slot = corpus
        .index
        .position(exclude_doc_id)
        .and_then(|p| pool.binary_search(&p).ok());
    let available = pool.len() - usize::from(excluded_slot.is_some());
    if available == 0 {
        return Err(Error::NoForeignDocument {
            exclude: exclude_doc_id.to_owned(),
        });
    }
    let mut slot = rng.random_range(0..available);
    if excluded_slot.is_some_and(|e| slot >= e) {
        slot += 1;
    }
    let doc = &corpus.index.documents()[pool[slot]];
    let candidates: Vec<&Paragraph> = doc
        .paragraphs()
        .iter()
        .filter(|p| objective.hosts_negative(p))
        .collect();
    let paragraph = candidates[rng.random_range(0..candidates.len())];
    Ok(draw_negative_b(objective, doc, paragraph, rng))
}

/// Per-objective counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveStats {
    pub documents_without_positives: u64,
    pub positives: u64,
    pub hard_negatives: u64,
    pub easy_negatives: u64,
    /// Positives that received fewer hard negatives than the quota because
    /// their document has no other eligible paragraph.
    pub hard_negative_shortfalls: u64,
    /// Easy negatives that could not be drawn (no foreign document).
    pub easy_negative_shortfalls: u64,
}

impl ObjectiveStats {
    pub fn records(&self) -> u64 {
        self.positives + self.hard_negatives + self.easy_negatives
    }
}

impl AddAssign for ObjectiveStats {
    fn add_assign(&mut self, o: Self) {
        self.documents_without_positives += o.documents_without_positives;
        self.positives += o.positives;
        self.hard_negatives += o.hard_negatives;
        self.easy_negatives += o.easy_negatives;
        self.hard_negative_shortfalls += o.hard_negative_shortfalls;
        self.easy_negative_shortfalls += o.easy_negative_shortfalls;
    }
}

/// Examples generated from one document for one objective, in emission
/// order: each positive is followed by its hard and then its easy negatives.
#[derive(Debug, Default)]
pub struct DocumentExamples {
    pub examples: Vec<SspExample>,
    pub stats: ObjectiveStats,
}

/// Draws the positive `(a, b, c)` for one paragraph.
fn draw_positive<R: Rng + ?Sized>(
    objective: Objective,
    doc: &Document,
    paragraph: &Paragraph,
    rng: &mut R,
) -> Option<(Span, Span, String)> {
    let n = paragraph.len();
    let (a, b) = match objective {
        Objective::Sdc => draw_pair(n, 0, MAX_B_SENTENCES, rng)?,
        // leave at least one sentence for the context
        Objective::Dpc => draw_pair(n, 0, n.saturating_sub(2), rng)?,
        Objective::Dslc => draw_pair(n, 1, MAX_B_SENTENCES, rng)?,
    };
    let c = match objective {
        Objective::Sdc => sdc_context(doc),
        Objective::Dpc => dpc_context(paragraph, &[a..a + 1, b.clone()]),
        Objective::Dslc => dslc_context(paragraph, &b),
    };
    if c.is_empty() {
        return None;
    }
    Some((Span::new(doc, paragraph, a..a + 1), Span::new(doc, paragraph, b), c))
}

fn build<R: Rng + ?Sized>(
    objective: Objective,
    doc: &Document,
    corpus: &CorpusSampler<'_>,
    cfg: &BuildConfig,
    rng: &mut R,
) -> DocumentExamples {
    let mut out = DocumentExamples::default();
    let hosts: Vec<&Paragraph> = doc
        .paragraphs()
        .iter()
        .filter(|p| objective.hosts_positive(p))
        .collect();
    if hosts.is_empty() || cfg.positives_per_paragraph == 0 {
        out.stats.documents_without_positives = 1;
        return out;
    }
    let hard_quota = cfg.max_hard_negatives.min(cfg.total_negatives);

    for paragraph in hosts {
        let i = paragraph.index_in_document();
        let hard_sources: Vec<&Paragraph> = doc
            .paragraphs()
            .iter()
            .filter(|p| {
                let j = p.index_in_document();
                j != i && (objective != Objective::Sdc || j > 0) && objective.hosts_negative(p)
            })
            .collect();

        for _ in 0..cfg.positives_per_paragraph {
            let Some((a, b, c)) = draw_positive(objective, doc, paragraph, rng) else {
                continue;
            };
            out.stats.positives += 1;
            out.examples.push(SspExample {
                objective,
                a: a.clone(),
                b,
                c,
                label: Label::Positive,
                negative_kind: None,
            });

            let mut hard = 0;
            if !hard_sources.is_empty() {
                for _ in 0..hard_quota {
                    let p = hard_sources[rng.random_range(0..hard_sources.len())];
                    let (b, c) = draw_negative_b(objective, doc, p, rng);
                    out.examples.push(SspExample {
                        objective,
                        a: a.clone(),
                        b,
                        c,
                        label: Label::Negative,
                        negative_kind: Some(NegativeKind::Hard),
                    });
                    hard += 1;
                }
            } else if hard_quota > 0 {
                out.stats.hard_negative_shortfalls += 1;
            }
            out.stats.hard_negatives += hard as u64;

            for _ in hard..cfg.total_negatives {
                match sample_easy_negative(corpus, doc.doc_id(), objective, rng) {
                    Ok((b, c)) => {
                        out.stats.easy_negatives += 1;
                        out.examples.push(SspExample {
                            objective,
                            a: a.clone(),
                            b,
                            c,
                            label: Label::Negative,
                            negative_kind: Some(NegativeKind::Easy),
                        });
                    }
                    Err(_) => out.stats.easy_negative_shortfalls += 1,
                }
            }
        }
    }
    out
}

/// SDC: positives come from paragraphs after the first; `c` is always the
/// first paragraph of `b`'s document.
pub fn build_sdc_examples<R: Rng + ?Sized>(
    doc: &Document,
    corpus: &CorpusSampler<'_>,
    cfg: &BuildConfig,
    rng: &mut R,
) -> DocumentExamples {
    build(Objective::Sdc, doc, corpus, cfg, rng)
}

/// DPC: `c` is `b`'s paragraph with the sentences of `a` and `b` removed.
pub fn build_dpc_examples<R: Rng + ?Sized>(
    doc: &Document,
    corpus: &CorpusSampler<'_>,
    cfg: &BuildConfig,
    rng: &mut R,
) -> DocumentExamples {
    build(Objective::Dpc, doc, corpus, cfg, rng)
}

/// DSLC: `c` is the sentence before and the sentence after `b`; in positives
/// `a` is never adjacent to `b`, so it never appears in `c`.
pub fn build_dslc_examples<R: Rng + ?Sized>(
    doc: &Document,
    corpus: &CorpusSampler<'_>,
    cfg: &BuildConfig,
    rng: &mut R,
) -> DocumentExamples {
    build(Objective::Dslc, doc, corpus, cfg, rng)
}

/// Generates one document's examples for `objective` on its own RNG stream.
pub fn build_document(
    objective: Objective,
    doc: &Document,
    corpus: &CorpusSampler<'_>,
    cfg: &BuildConfig,
) -> DocumentExamples {
    let mut rng = document_rng(cfg.seed, objective, doc.doc_id());
    build(objective, doc, corpus, cfg, &mut rng)
}
