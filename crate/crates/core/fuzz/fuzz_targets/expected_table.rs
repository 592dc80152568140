#![no_main]

use causal_work::expected::ExpectedTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = ExpectedTable::parse(text) {
        assert!(table.entries.iter().all(|e| e.tolerance > 0.0));
    }
});
