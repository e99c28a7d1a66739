//! Reading-comprehension annotations to answer-sentence-selection data.
//!
//! Every sentence of the referenced document becomes a candidate, labelled
//! positive when it contains one of the annotated answers. The context of a
//! candidate is its previous and next sentence inside the same paragraph.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusIndex;
use crate::error::{Error, Result};
use crate::serializer::FineTuneRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrAnnotation {
    pub question_id: String,
    pub question: String,
    pub doc_id: String,
    pub answers: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    pub case_insensitive: bool,
}

/// Collapses whitespace runs to one space and trims; lowercases on request.
pub fn normalize(text: &str, opts: MatchOptions) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if opts.case_insensitive {
        collapsed.to_lowercase()
    } else {
        collapsed
    }
}

#[derive(Debug, Default)]
pub struct Conversion {
    pub records: Vec<FineTuneRecord>,
    /// Annotations that could not be converted, with the reason.
    pub errors: Vec<Error>,
    /// Question ids whose answers matched no sentence.
    pub unmatched: Vec<String>,
    pub questions: usize,
    pub positives: usize,
    /// Mean over questions of the fraction of positive sentences.
    pub mean_positive_rate: f64,
}

impl Conversion {
    /// Fraction of all emitted records that are positive.
    pub fn positive_rate(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.positives as f64 / self.records.len() as f64
        }
    }
}

/// Converts each annotation into one record per sentence of its document.
pub fn build_as2_from_mr(corpus: &CorpusIndex, annotations: &[MrAnnotation], opts: MatchOptions) -> Conversion {
    let mut out = Conversion::default();
    let mut rate_sum = 0.0;
    for ann in annotations {
        let Some(doc) = corpus.get(&ann.doc_id) else {
            out.errors.push(Error::UnknownDocument {
                question_id: ann.question_id.clone(),
                doc_id: ann.doc_id.clone(),
            });
            continue;
        };
        let answers: Vec<String> = ann
            .answers
            .iter()
            .map(|a| normalize(a, opts))
            .filter(|a| !a.is_empty())
            .collect();
        if answers.is_empty() {
            out.errors.push(Error::InvalidRecord(format!(
                "question {} has no non-empty answer",
                ann.question_id
            )));
            continue;
        }
        let mut positives = 0;
        let mut emitted = 0;
        for paragraph in doc.paragraphs() {
            let sentences = paragraph.sentences();
            for (i, s) in sentences.iter().enumerate() {
                let text = normalize(s.text(), opts);
                let label = u8::from(answers.iter().any(|a| text.contains(a.as_str())));
                let before = i.checked_sub(1).map(|p| sentences[p].text());
                let after = sentences.get(i + 1).map(|n| n.text());
                let context = before.into_iter().chain(after).collect::<Vec<_>>().join(" ");
                positives += usize::from(label);
                emitted += 1;
                out.records.push(FineTuneRecord {
                    question_id: ann.question_id.clone(),
                    question: ann.question.clone(),
                    candidate: s.text().to_owned(),
                    context: Some(context),
                    label,
                });
            }
        }
        if positives == 0 {
            log::warn!("question {}: no sentence contains an annotated answer", ann.question_id);
            out.unmatched.push(ann.question_id.clone());
        }
        out.questions += 1;
        out.positives += positives;
        rate_sum += positives as f64 / emitted as f64;
    }
    if out.questions > 0 {
        out.mean_positive_rate = rate_sum / out.questions as f64;
    }
    out
}

pub fn parse_annotations(reader: impl BufRead, path: &Path) -> Result<Vec<MrAnnotation>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::malformed(path, i + 1, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::malformed(path, i + 1, e))?);
    }
    Ok(out)
}

pub fn read_annotations(path: &Path) -> Result<Vec<MrAnnotation>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(BufReader::new(file), path)
}
