#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::knowledge::{select_glosses, SenseInventory};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inv) = SenseInventory::from_json_str(text) {
        let _ = select_glosses("bat", &inv);
        let _ = SenseInventory::from_json_str(&inv.to_json()).expect("inventory round-trips");
    }
});
