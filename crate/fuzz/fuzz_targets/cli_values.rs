#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::{Language, SystemId, Weights};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = s.parse::<Weights>() {
        w.validate().expect("parsed weights are valid");
    }
    if let Ok(id) = s.parse::<SystemId>() {
        assert_eq!(id.to_string().parse::<SystemId>().ok(), Some(id));
    }
    let _ = s.parse::<Language>();
});
