//! Deterministic synthetic corpora for tests, benchmarks and demos.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::RawDocument;
use crate::error::{Error, Result};

const WORDS: &[&str] = &[
    "river",
    "mountain",
    "engine",
    "garden",
    "letter",
    "signal",
    "harbor",
    "market",
    "forest",
    "bridge",
    "window",
    "teacher",
    "station",
    "council",
    "weather",
    "painting",
    "village",
    "history",
    "machine",
    "captain",
    "season",
    "island",
    "library",
    "theory",
    "festival",
    "museum",
    "railway",
    "kingdom",
    "printer",
    "orchestra",
    "vessel",
    "desert",
    "factory",
    "harvest",
    "journal",
    "lantern",
    "meadow",
    "network",
    "planet",
    "quarry",
    "record",
    "senate",
    "temple",
    "valley",
    "workshop",
    "anthem",
    "border",
    "canal",
    "dialect",
    "empire",
    "fabric",
    "glacier",
    "highway",
    "ink",
    "jungle",
    "keeper",
    "ledger",
    "mineral",
    "novel",
    "outpost",
    "pilgrim",
    "the",
    "a",
    "of",
    "and",
    "to",
    "in",
    "with",
    "from",
    "by",
    "near",
    "over",
    "under",
    "after",
    "before",
    "built",
    "opened",
    "carried",
    "studied",
    "painted",
    "measured",
    "crossed",
    "restored",
    "described",
    "moved",
    "old",
    "new",
    "small",
    "large",
    "quiet",
    "northern",
    "southern",
    "ancient",
    "modern",
    "famous",
    "hidden",
    "was",
    "were",
    "became",
    "remained",
    "seemed",
    "grew",
    "stood",
    "ran",
    "fell",
    "rose",
];

const NAMES: &[&str] = &[
    "Ada", "Boris", "Chen", "Dolores", "Emeka", "Farah", "Gustav", "Hana", "Ivo", "Juno", "Kofi", "Lena",
];

/// Shape of a synthetic corpus.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub documents: usize,
    pub seed: u64,
    pub min_paragraphs: usize,
    pub max_paragraphs: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    /// Probability that a sentence is deliberately shorter than 20 characters.
    pub short_sentence_rate: f64,
    /// Probability that a document is a single short line.
    pub tiny_document_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            documents: 500,
            seed: 0,
            min_paragraphs: 1,
            max_paragraphs: 10,
            min_sentences: 1,
            max_sentences: 8,
            short_sentence_rate: 0.08,
            tiny_document_rate: 0.03,
        }
    }
}

fn sentence<R: Rng>(rng: &mut R) -> String {
    let mut s = String::new();
    if rng.random_bool(0.1) {
        s.push_str("Dr. ");
        s.push_str(NAMES[rng.random_range(0..NAMES.len())]);
    } else {
        let first = WORDS[rng.random_range(0..WORDS.len())];
        let mut c = first.chars();
        let head = c.next().expect("non-empty word");
        s.extend(head.to_uppercase());
        s.push_str(c.as_str());
    }
    for _ in 0..rng.random_range(4..14) {
        s.push(' ');
        if rng.random_bool(0.05) {
            s.push_str(&format!("{}.{}", rng.random_range(1..100), rng.random_range(0..10)));
        } else {
            s.push_str(WORDS[rng.random_range(0..WORDS.len())]);
        }
    }
    s.push(match rng.random_range(0..20) {
        0 => '?',
        1 => '!',
        _ => '.',
    });
    s
}

fn short_sentence<R: Rng>(rng: &mut R) -> String {
    format!("{} ran.", NAMES[rng.random_range(0..NAMES.len())])
}

/// One synthetic document; ids are `doc-NNNNNNN`.
pub fn synth_document(cfg: &SynthConfig, index: usize) -> RawDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let id = format!("doc-{index:07}");
    if rng.random_bool(cfg.tiny_document_rate) {
        return RawDocument {
            id,
            title: None,
            text: short_sentence(&mut rng),
        };
    }
    let paragraphs = rng.random_range(cfg.min_paragraphs..=cfg.max_paragraphs);
    let mut text = String::new();
    for p in 0..paragraphs {
        if p > 0 {
            text.push_str("\n\n");
        }
        let sentences = rng.random_range(cfg.min_sentences..=cfg.max_sentences);
        for s in 0..sentences {
            if s > 0 {
                // occasional soft wrap inside a paragraph
                text.push(if rng.random_bool(0.1) { '\n' } else { ' ' });
            }
            if rng.random_bool(cfg.short_sentence_rate) {
                text.push_str(&short_sentence(&mut rng));
            } else {
                text.push_str(&sentence(&mut rng));
            }
        }
    }
    RawDocument {
        id,
        title: Some(format!("Synthetic {index}")),
        text,
    }
}

pub fn synth_corpus(cfg: &SynthConfig) -> Vec<RawDocument> {
    (0..cfg.documents).map(|i| synth_document(cfg, i)).collect()
}

/// Writes documents as JSON lines until `cfg.documents` are written or, when
/// given, `target_bytes` is reached. Returns (documents, bytes).
pub fn write_synth_corpus(path: &Path, cfg: &SynthConfig, target_bytes: Option<u64>) -> Result<(usize, u64)> {
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let mut bytes = 0u64;
    let mut docs = 0;
    loop {
        let done = match target_bytes {
            Some(t) => bytes >= t,
            None => docs >= cfg.documents,
        };
        if done {
            break;
        }
        let line = serde_json::to_string(&synth_document(cfg, docs)).expect("raw documents serialize");
        out.write_all(line.as_bytes()).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
        bytes += line.len() as u64 + 1;
        docs += 1;
    }
    out.flush().map_err(io)?;
    Ok((docs, bytes))
}
