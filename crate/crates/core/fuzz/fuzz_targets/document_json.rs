#![no_main]

use causal_work::io::{parse_document, Document};
use causal_work::process::validate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(Document::Operator(op)) = parse_document(text) {
        // wrong dims are an error, never a panic
        let _ = validate(&op);
    }
});
