#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = x0star_cli::tables::parse_golden(text) {
            assert!(!table.id.is_empty());
        }
    }
});
