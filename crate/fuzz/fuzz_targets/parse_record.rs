#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(line) = std::str::from_utf8(data) {
        if let Ok(orbit) = x0star::nfdata::parse_record(line, 0) {
            assert!(orbit.dim > 0);
            assert_eq!(orbit.q_basis.len(), orbit.dim);
        }
    }
});
