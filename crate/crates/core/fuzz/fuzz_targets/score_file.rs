#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use ssp_forge::eval::{evaluate, parse_scores};

fuzz_target!(|data: &[u8]| {
    if let Ok(sets) = parse_scores(data, Path::new("scores.jsonl")) {
        if let Ok(report) = evaluate(sets, true) {
            for m in [report.p_at_1, report.map, report.mrr] {
                assert!((0.0..=1.0).contains(&m));
            }
        }
    }
});
