#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::knowledge::{build_supplementary, parse_image_mappings};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mappings) = parse_image_mappings(text) {
        let _ = build_supplementary(&mappings, 9, 0);
    }
});
