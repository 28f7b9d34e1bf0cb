//! The acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use dualcat::selftest::{run_suite, SUITES};

const SEED: u64 = 0;

fn main() -> ExitCode {
    let mut failed = 0;
    for (n, name) in SUITES.iter().enumerate() {
        let start = Instant::now();
        let report = run_suite(name, SEED).expect("known suite");
        let secs = start.elapsed().as_secs_f64();
        match report {
            Ok(r) => {
                println!("{} criterion {}: {r} [{secs:.1}s]", if r.passed() { "PASS" } else { "FAIL" }, n + 1);
                for f in r.failures.iter().take(5) {
                    println!("    {f}");
                }
                failed += usize::from(!r.passed());
            }
            Err(e) => {
                println!("FAIL criterion {}: {name} errored: {e} [{secs:.1}s]", n + 1);
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria passed", SUITES.len() - failed, SUITES.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
