#![no_main]

use hrtrack::TrackerConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = hrtrack::io::parse_config(text, TrackerConfig::default());
    }
});
