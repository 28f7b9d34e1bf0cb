#![no_main]

use dualcat::linalg::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = dualcat::io::assignment_from_json(Field::Prime(5), s) {
            let _ = dualcat::endofunctors::check_functorial(&c);
        }
    }
});
