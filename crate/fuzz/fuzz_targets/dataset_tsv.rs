#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::dataset::{parse_dataset, serialize_dataset};
use vwsd::Language;

// data and gold separated by a NUL byte
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (data, gold) = match text.split_once('\0') {
        Some((d, g)) => (d, Some(g)),
        None => (text, None),
    };
    if let Ok(ds) = parse_dataset("fuzz", data, gold, Language::En) {
        let (d, g) = serialize_dataset(&ds);
        let again = parse_dataset("fuzz", &d, g.as_deref(), Language::En).expect("serialized dataset reparses");
        assert_eq!(again.instances, ds.instances);
    }
});
