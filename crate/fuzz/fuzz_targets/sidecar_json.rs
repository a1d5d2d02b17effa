#![no_main]

use cvqkd_core::optics::{read_sidecar, write_sidecar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sidecar) = read_sidecar(text) {
        let mut buf = Vec::new();
        write_sidecar(&sidecar, &mut buf).unwrap();
        read_sidecar(std::str::from_utf8(&buf).unwrap()).unwrap();
    }
});
