#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::providers::EmbeddingStore;

fuzz_target!(|data: &[u8]| {
    if let Ok(store) = EmbeddingStore::from_bytes(data) {
        let bytes = store.to_bytes().expect("decoded store encodes");
        let again = EmbeddingStore::from_bytes(&bytes).expect("encoded store decodes");
        assert_eq!(again.records(), store.records());
    }
});
