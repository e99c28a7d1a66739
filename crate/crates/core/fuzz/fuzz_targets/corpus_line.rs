#![no_main]

use libfuzzer_sys::fuzz_target;
use ssp_forge::corpus::{filter_document, parse_corpus_line, segment_document, FilterConfig};

fuzz_target!(|data: &str| {
    if let Ok(raw) = parse_corpus_line(data) {
        if let Ok(doc) = segment_document(&raw.id, raw.title.as_deref(), &raw.text) {
            let _ = filter_document(&doc, &FilterConfig::default());
        }
    }
});
