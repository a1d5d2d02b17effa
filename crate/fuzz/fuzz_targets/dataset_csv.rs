#![no_main]

use cvqkd_core::optics::{read_dataset_csv, write_dataset_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = read_dataset_csv(data) {
        let mut buf = Vec::new();
        write_dataset_csv(&samples, &mut buf).unwrap();
        let again = read_dataset_csv(buf.as_slice()).unwrap();
        assert_eq!(again.len(), samples.len());
    }
});
