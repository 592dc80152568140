#![no_main]

use causal_work::io::{parse_grid, MAX_GRID};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_grid(text) {
        assert!(!grid.is_empty() && grid.len() <= MAX_GRID);
        assert!(grid.iter().all(|v| v.is_finite()));
    }
});
