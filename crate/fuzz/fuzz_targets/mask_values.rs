#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::rankers::parse_mask_values;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_mask_values(text);
    }
});
