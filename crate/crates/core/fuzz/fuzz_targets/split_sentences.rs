#![no_main]

use libfuzzer_sys::fuzz_target;
use ssp_forge::corpus::split_sentences;

fuzz_target!(|text: &str| {
    let sentences = split_sentences(text);
    let kept: usize = sentences
        .iter()
        .map(|s| s.text().chars().filter(|c| !c.is_whitespace()).count())
        .sum();
    assert_eq!(kept, text.chars().filter(|c| !c.is_whitespace()).count());
});
