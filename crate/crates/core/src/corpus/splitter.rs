//! Deterministic rule-based sentence splitter.
//!
//! A boundary is placed after a run of terminators (`.`, `!`, `?`), optionally
//! followed by closing quotes or brackets, when the run is followed by
//! whitespace and then an uppercase letter (possibly behind opening quotes or
//! brackets), or by the end of the text. A lone `.` does not end a sentence
//! when the token it closes is a listed abbreviation or a single-letter
//! initial such as `J.`.

use std::collections::HashSet;
use std::sync::LazyLock;

use super::Sentence;

const ABBREVIATION_DATA: &str = include_str!("../../data/abbreviations.txt");

/// Version of the bundled abbreviation list.
pub static ABBREVIATIONS_VERSION: LazyLock<u32> = LazyLock::new(|| {
    ABBREVIATION_DATA
        .lines()
        .find_map(|l| l.trim().strip_prefix("# version:"))
        .and_then(|v| v.trim().parse().ok())
        .expect("abbreviation list carries a version line")
});

static ABBREVIATIONS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| {
    ABBREVIATION_DATA
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
});

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201D}' | '\u{2019}' | '\u{00BB}')
}

fn is_opening(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '{' | '\u{201C}' | '\u{2018}' | '\u{00AB}')
}

/// True when the `.` ending at byte `dot` closes an abbreviation or initial.
fn closes_abbreviation(text: &str, dot: usize) -> bool {
    let token_start = text[..dot]
        .rfind(char::is_whitespace)
        .map_or(0, |i| i + text[i..].chars().next().map_or(1, char::len_utf8));
    let token = text[token_start..=dot].trim_start_matches(is_opening);
    let body = &token[..token.len() - 1];

    let mut chars = body.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_uppercase() {
            return true;
        }
    }
    ABBREVIATIONS.contains(token.to_lowercase().as_str())
}

/// Byte offsets at which a new sentence ends (exclusive).
fn boundaries(text: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut j = i;
        while j < chars.len() && is_terminator(chars[j].1) {
            j += 1;
        }
        let single_dot = j - run_start == 1 && c == '.';
        while j < chars.len() && is_closing(chars[j].1) {
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |&(p, _)| p);

        // Skip whitespace, then any opening punctuation, and inspect the next letter.
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let at_end = k == chars.len();
        let followed_by_space = k > j;
        while k < chars.len() && is_opening(chars[k].1) {
            k += 1;
        }
        let next_upper = chars.get(k).is_some_and(|&(_, n)| n.is_uppercase());

        let candidate = at_end || (followed_by_space && next_upper);
        if candidate && !at_end && single_dot && closes_abbreviation(text, pos) {
            i = j;
            continue;
        }
        if candidate && !at_end {
            out.push(end);
        }
        i = j.max(i + 1);
    }
    out
}

/// Split one paragraph of text into sentences.
///
/// Sentence texts are trimmed slices of the input, so concatenating them
/// preserves every non-whitespace character in order. Whitespace-only input
/// yields no sentences.
pub fn split_sentences(paragraph_text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut start = 0;
    for end in boundaries(paragraph_text)
        .into_iter()
        .chain(std::iter::once(paragraph_text.len()))
    {
        let piece = paragraph_text[start..end].trim();
        if !piece.is_empty() {
            out.push(Sentence::new(piece.to_owned(), out.len()));
        }
        start = end;
    }
    out
}
