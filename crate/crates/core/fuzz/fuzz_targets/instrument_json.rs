#![no_main]

use causal_work::instrument::validate_instrument;
use causal_work::io::{instrument_to_value, parse_instrument, OperatorForm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = parse_instrument(text) {
        let _ = validate_instrument(&inst);
        let v = instrument_to_value(&inst, OperatorForm::Dense).unwrap();
        parse_instrument(&v.to_string()).expect("dense output re-parses");
    }
});
