#![no_main]

use causal_work::io::{operator_to_value, parse_operator, OperatorForm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(op) = parse_operator(text) {
        let v = operator_to_value(&op, OperatorForm::Dense).unwrap();
        let back = parse_operator(&v.to_string()).expect("dense output re-parses");
        assert_eq!(back.dims(), op.dims());
    }
});
