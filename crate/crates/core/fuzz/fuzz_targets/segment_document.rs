#![no_main]

use libfuzzer_sys::fuzz_target;
use ssp_forge::corpus::{filter_document, segment_document, FilterConfig};

fuzz_target!(|text: &str| {
    let Ok(doc) = segment_document("fuzz", None, text) else {
        assert!(text.trim().is_empty());
        return;
    };
    for p in doc.paragraphs() {
        assert!(!p.is_empty());
        for s in p.sentences() {
            assert!(!s.text().is_empty());
        }
    }
    let f = FilterConfig::default();
    if let Some(once) = filter_document(&doc, &f) {
        assert_eq!(filter_document(&once, &f).as_ref(), Some(&once));
    }
});
