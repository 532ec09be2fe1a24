#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::wire::EmbedResponse;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<EmbedResponse>(data);
});
