#![no_main]

use cvqkd_cli::range::{parse_range, parse_values, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for parsed in [parse_range(text), parse_values(text)] {
        if let Ok(values) = parsed {
            assert!(!values.is_empty() && values.len() <= MAX_POINTS);
            assert!(values.iter().all(|v| v.is_finite()));
        }
    }
});
