#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use ssp_forge::corpus::{CorpusIndex, Document};
use ssp_forge::mr::{build_as2_from_mr, parse_annotations, MatchOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(annotations) = parse_annotations(data, Path::new("ann.jsonl")) else {
        return;
    };
    let doc = Document::from_paragraphs("d1", None, [vec!["The bridge opened in 1932.", "It carried trains."]])
        .expect("fixed document");
    let (index, _) = CorpusIndex::new(vec![doc]);
    for case_insensitive in [false, true] {
        let out = build_as2_from_mr(&index, &annotations, MatchOptions { case_insensitive });
        assert_eq!(out.records.len(), 2 * out.questions);
    }
});
