#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = dualcat::io::parse_sigma(s);
        let _ = dualcat::io::sigma_from_json(s);
    }
});
