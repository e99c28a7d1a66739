#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use ssp_forge::serializer::{read_shard_from, EncodedRecord, ShardRecord};

fuzz_target!(|data: &[u8]| {
    let path = Path::new("fuzz.jsonl");
    if let Ok(records) = read_shard_from::<ShardRecord>(data, path) {
        for r in records.iter().filter(|r| !r.c.is_empty()) {
            assert!(r.encode().check_layout().is_ok());
        }
    }
    let _ = read_shard_from::<EncodedRecord>(data, path);
});
