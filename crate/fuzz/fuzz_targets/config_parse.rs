#![no_main]

use libfuzzer_sys::fuzz_target;
use twolayer_experiments::Config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = Config::parse(text) {
            // a validated config must build its model without panicking
            let _ = cfg.problem();
        }
    }
});
