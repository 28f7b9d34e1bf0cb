#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = dualcat::io::formal_from_json(s) {
            let back = dualcat::io::formal_to_json(&f).to_string();
            dualcat::io::formal_from_json(&back).expect("round trip");
        }
    }
});
