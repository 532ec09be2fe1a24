#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::augment::TextCache;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cache) = TextCache::parse(text) {
        let again = TextCache::parse(&cache.to_tsv()).expect("cache round-trips");
        assert_eq!(again.len(), cache.len());
    }
});
