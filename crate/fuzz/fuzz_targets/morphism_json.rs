#![no_main]

use dualcat::linalg::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = dualcat::io::sym_from_json(Field::Prime(7), s) {
            let back = dualcat::io::sym_to_json(&m).to_string();
            dualcat::io::sym_from_json(Field::Prime(7), &back).expect("round trip");
        }
    }
});
