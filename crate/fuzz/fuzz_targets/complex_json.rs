#![no_main]

use dualcat::complexes::Validation;
use dualcat::linalg::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        for k in [Field::Prime(7), Field::Rational] {
            let Ok(c) = dualcat::io::complex_from_json(k, s) else { continue };
            // Round trip must reparse.
            let back = dualcat::io::complex_to_json(&c).to_string();
            dualcat::io::complex_from_json(k, &back).expect("round trip");
            if c.validate() == Validation::Ok && back.len() < 4096 {
                let _ = dualcat::decomp::barcode(&c);
            }
        }
    }
});
