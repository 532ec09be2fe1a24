#![no_main]
use libfuzzer_sys::fuzz_target;
use vwsd::SystemConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = SystemConfig::from_toml_str(text) {
        let again = SystemConfig::from_toml_str(&cfg.to_toml()).expect("config round-trips");
        assert_eq!(again.system, cfg.system);
    }
});
