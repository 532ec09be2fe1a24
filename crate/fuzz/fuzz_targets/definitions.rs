#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::augment::parse_definitions;

// first line lists the requested contexts separated by '|'
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (head, response) = text.split_once('\n').unwrap_or((text, ""));
    let contexts: Vec<String> = head.split('|').map(str::to_string).collect();
    if let Ok(defs) = parse_definitions(response, &contexts) {
        assert!(defs.keys().all(|k| contexts.contains(k)));
    }
});
