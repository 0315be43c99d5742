// Accuracy report for the Airy layer: reference values, Wronskian, zeros,
// the zero identity and the envelope constant.

use stark_spectrum::airy::{airy_eval, airy_zero};
use stark_spectrum::experiment::airy_selftest;

fn main() {
    let report = airy_selftest().expect("self-test runs");
    for c in &report.checks {
        println!(
            "{:<18} {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    println!("envelope margin C0 = {:.6}", report.envelope_margin);

    let v = airy_eval(-3.0).unwrap();
    println!("Ai(-3) = {:.15}, Bi(-3) = {:.15}", v.ai, v.bi);
    for n in [1, 10, 100] {
        println!("a_{n} = {:.15}", airy_zero(n).unwrap().a_n);
    }
    assert!(report.passed);
}
