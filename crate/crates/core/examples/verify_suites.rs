//! Runs the exhaustive verification suites and prints one line per suite.

use erasure_qec::verify::{run_verify, VerifyOptions};

fn main() -> erasure_qec::Result<()> {
    let report = run_verify(&VerifyOptions {
        seed: 0,
        random_circuits: 200,
    })?;
    for s in &report.suites {
        println!("{} {}: {} cases", if s.passed { "PASS" } else { "FAIL" }, s.name, s.cases);
    }
    Ok(())
}
