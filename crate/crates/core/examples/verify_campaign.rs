// A full verification campaign written to a scratch directory.

use stark_spectrum::experiment::{parse_config, run_verify};

fn main() {
    let out = std::env::temp_dir().join(format!("stark-verify-example-{}", std::process::id()));
    let config = format!(
        r#"{{
            "potential": {{"family": "exp", "params": {{"c": 0.3, "a": 1}}, "r": 2}},
            "n_min": 2,
            "n_max": 40,
            "output_dir": {}
        }}"#,
        serde_json::to_string(&out).unwrap()
    );
    let cfg = parse_config(&config).unwrap();
    let summary = run_verify(&cfg).unwrap();
    for c in &summary.checks {
        println!(
            "{:<13} {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    println!("status {}; reports in {}", summary.status, out.display());
    assert!(summary.passed());
    std::fs::remove_dir_all(&out).unwrap();
}
