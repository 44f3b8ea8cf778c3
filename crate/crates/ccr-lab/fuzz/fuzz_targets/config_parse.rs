#![no_main]

use ccr_lab::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Parsing and validation must never panic, whatever the input.
    if let Ok(config) = serde_json::from_str::<RunConfig>(text) {
        let _ = config.check();
        let _ = config.hash();
    }
});
