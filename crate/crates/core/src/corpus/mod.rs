//! Document → paragraph → sentence hierarchy, segmentation and length filters.

mod reader;
mod splitter;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use reader::{load_corpus, parse_corpus_line, read_raw_documents, InputError, LoadedCorpus, RawDocument};
pub use splitter::{split_sentences, ABBREVIATIONS_VERSION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    text: String,
    char_len: usize,
    index_in_paragraph: usize,
}

impl Sentence {
    pub(crate) fn new(text: String, index_in_paragraph: usize) -> Self {
        let char_len = text.chars().count();
        Sentence {
            text,
            char_len,
            index_in_paragraph,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn index_in_paragraph(&self) -> usize {
        self.index_in_paragraph
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    sentences: Vec<Sentence>,
    index_in_document: usize,
    char_len: usize,
}

impl Paragraph {
    /// Builds a paragraph from already-split sentence texts, assigning indices.
    ///
    /// Returns `None` when no non-blank sentence remains.
    pub fn from_sentences<I, S>(texts: I, index_in_document: usize) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sentences: Vec<Sentence> = texts
            .into_iter()
            .map(Into::into)
            .filter(|t| !t.trim().is_empty())
            .enumerate()
            .map(|(i, t)| Sentence::new(t.trim().to_owned(), i))
            .collect();
        Self::from_parts(sentences, index_in_document)
    }

    fn from_parts(mut sentences: Vec<Sentence>, index_in_document: usize) -> Option<Self> {
        if sentences.is_empty() {
            return None;
        }
        for (i, s) in sentences.iter_mut().enumerate() {
            s.index_in_paragraph = i;
        }
        let char_len = sentences.iter().map(|s| s.char_len).sum::<usize>() + sentences.len() - 1;
        Some(Paragraph {
            sentences,
            index_in_document,
            char_len,
        })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn index_in_document(&self) -> usize {
        self.index_in_document
    }

    /// Sentence characters plus one per single-space join.
    pub fn char_len(&self) -> usize {
        self.char_len
    }

    /// Space-joined text of the sentences in `range`.
    pub fn join(&self, range: std::ops::Range<usize>) -> String {
        join_sentences(&self.sentences[range])
    }

    pub fn text(&self) -> String {
        join_sentences(&self.sentences)
    }
}

pub(crate) fn join_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&s.text);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    doc_id: String,
    title: Option<String>,
    paragraphs: Vec<Paragraph>,
    char_len: usize,
}

impl Document {
    /// Builds a document from paragraphs of sentence texts. Empty paragraphs
    /// are dropped; a document without any paragraph is an error.
    pub fn from_paragraphs<P, S>(
        doc_id: impl Into<String>,
        title: Option<String>,
        paragraphs: impl IntoIterator<Item = P>,
    ) -> Result<Self>
    where
        P: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let doc_id = doc_id.into();
        let paragraphs = paragraphs
            .into_iter()
            .filter_map(|p| Paragraph::from_sentences(p, 0))
            .collect();
        Self::from_parts(doc_id.clone(), title, paragraphs).ok_or(Error::EmptyDocument { doc_id })
    }

    fn from_parts(doc_id: String, title: Option<String>, mut paragraphs: Vec<Paragraph>) -> Option<Self> {
        if paragraphs.is_empty() {
            return None;
        }
        for (i, p) in paragraphs.iter_mut().enumerate() {
            p.index_in_document = i;
        }
        let char_len = paragraphs.iter().map(|p| p.char_len).sum();
        Some(Document {
            doc_id,
            title,
            paragraphs,
            char_len,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn paragraphs(&self) -> &[Paragraph] {
        &self.paragraphs
    }

    /// Sum of paragraph lengths.
    pub fn char_len(&self) -> usize {
        self.char_len
    }

    pub fn sentence_count(&self) -> usize {
        self.paragraphs.iter().map(Paragraph::len).sum()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.paragraphs.iter().flat_map(|p| p.sentences.iter())
    }
}

/// Segments raw text: paragraphs are separated by one or more blank lines,
/// single newlines inside a paragraph are soft wraps, and each paragraph is
/// sentence-split.
pub fn segment_document(doc_id: &str, title: Option<&str>, raw_text: &str) -> Result<Document> {
    let mut paragraphs = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, paragraphs: &mut Vec<Paragraph>| {
        if !current.is_empty() {
            let sentences = split_sentences(current);
            if let Some(p) = Paragraph::from_parts(sentences, paragraphs.len()) {
                paragraphs.push(p);
            }
            current.clear();
        }
    };
    for line in raw_text.lines() {
        if line.trim().is_empty() {
            flush(&mut current, &mut paragraphs);
            continue;
        }
        for word in line.split_whitespace() {
            if !current.is_empty() {
                current.push(' ');
            }
            current.push_str(word);
        }
    }
    flush(&mut current, &mut paragraphs);

    Document::from_parts(doc_id.to_owned(), title.map(str::to_owned), paragraphs).ok_or_else(|| Error::EmptyDocument {
        doc_id: doc_id.to_owned(),
    })
}

/// Minimum lengths, in Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_sentence_chars: usize,
    pub min_paragraph_chars: usize,
    pub min_document_chars: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_sentence_chars: 20,
            min_paragraph_chars: 60,
            min_document_chars: 200,
        }
    }
}

impl FilterConfig {
    /// Thresholds that keep every non-empty unit.
    pub fn disabled() -> Self {
        FilterConfig {
            min_sentence_chars: 0,
            min_paragraph_chars: 0,
            min_document_chars: 0,
        }
    }
}

/// Drops short sentences, then short paragraphs, then the document itself if
/// it is still too short. Lengths are recomputed after each stage and indices
/// re-packed.
pub fn filter_document(doc: &Document, filters: &FilterConfig) -> Option<Document> {
    let paragraphs: Vec<Paragraph> = doc
        .paragraphs
        .iter()
        .filter_map(|p| {
            let kept = p
                .sentences
                .iter()
                .filter(|s| s.char_len >= filters.min_sentence_chars)
                .cloned()
                .collect();
            Paragraph::from_parts(kept, 0)
        })
        .filter(|p| p.char_len >= filters.min_paragraph_chars)
        .collect();
    let doc = Document::from_parts(doc.doc_id.clone(), doc.title.clone(), paragraphs)?;
    (doc.char_len >= filters.min_document_chars).then_some(doc)
}

/// Read-only, doc_id-sorted view over a corpus with lookup by id.
#[derive(Debug, Default)]
pub struct CorpusIndex {
    docs: Vec<Document>,
    by_id: HashMap<String, usize>,
}

impl CorpusIndex {
    /// Sorts by doc_id. Later duplicates of an id are dropped and returned.
    pub fn new(mut docs: Vec<Document>) -> (Self, Vec<String>) {
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        let mut duplicates = Vec::new();
        docs.dedup_by(|later, earlier| {
            let dup = later.doc_id == earlier.doc_id;
            if dup {
                duplicates.push(later.doc_id.clone());
            }
            dup
        });
        let by_id = docs.iter().enumerate().map(|(i, d)| (d.doc_id.clone(), i)).collect();
        (CorpusIndex { docs, by_id }, duplicates)
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.by_id.get(doc_id).map(|&i| &self.docs[i])
    }

    pub fn position(&self, doc_id: &str) -> Option<usize> {
        self.by_id.get(doc_id).copied()
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}
