#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(Some(file)) = x0star_cli::cache::parse(text) {
            assert_eq!(file.schema, x0star_cli::cache::CACHE_SCHEMA);
        }
    }
});
