#![no_main]

use dualcat::linalg::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = dualcat::io::parse_size(s);
        let _ = s.parse::<Field>();
        let _ = Field::Prime(7).parse(s);
        let _ = Field::Rational.parse(s);
    }
});
