//! Replays the checked-in fuzz seeds through the same entry points the fuzz
//! targets drive.

use std::fs;
use std::path::PathBuf;

use dualcat::complexes::Validation;
use dualcat::io;
use dualcat::linalg::Field;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn complex_seeds_round_trip() {
    let mut parsed = 0;
    for (name, text) in seeds("complex_json") {
        for k in [Field::Prime(7), Field::Rational] {
            let Ok(c) = io::complex_from_json(k, &text) else { continue };
            parsed += 1;
            let back = io::complex_to_json(&c).to_string();
            assert_eq!(io::complex_from_json(k, &back).unwrap(), c, "{name}");
            if c.validate() == Validation::Ok {
                dualcat::decomp::barcode(&c).unwrap();
            }
        }
    }
    assert!(parsed >= 6);
}

#[test]
fn formal_and_morphism_seeds_round_trip() {
    for (name, text) in seeds("formal_json") {
        let f = io::formal_from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(io::formal_from_json(&io::formal_to_json(&f).to_string()).unwrap(), f);
    }
    let k = Field::Prime(7);
    for (name, text) in seeds("morphism_json") {
        let m = io::sym_from_json(k, &text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(io::sym_from_json(k, &io::sym_to_json(&m).to_string()).unwrap(), m);
    }
}

#[test]
fn assignment_seeds_are_functorial() {
    for (name, text) in seeds("assignment_json") {
        let c = io::assignment_from_json(Field::Prime(5), &text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(dualcat::endofunctors::check_functorial(&c).is_empty(), "{name}");
    }
}

#[test]
fn string_seeds_do_not_panic() {
    for (_, s) in seeds("sigma") {
        let _ = io::parse_sigma(&s);
        let _ = io::sigma_from_json(&s);
    }
    assert!(io::parse_group_elem("0,1").is_err());
    for (_, s) in seeds("group_elem") {
        let _ = io::parse_group_elem(&s);
    }
    for (_, s) in seeds("scalars") {
        let _ = io::parse_size(&s);
        let _ = s.parse::<Field>();
        let _ = Field::Prime(7).parse(&s);
        let _ = Field::Rational.parse(&s);
    }
}
