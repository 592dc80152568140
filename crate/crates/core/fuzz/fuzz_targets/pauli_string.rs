#![no_main]

use causal_work::pauli::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = text.parse::<PauliString>() {
        assert_eq!(s.to_string().parse::<PauliString>().unwrap(), s);
    }
});
