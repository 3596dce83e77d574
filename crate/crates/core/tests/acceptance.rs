//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

use caustic_core::validation::{run_all, ValidationConfig};

fn main() {
    let reports = run_all(&ValidationConfig::default());
    println!();
    for r in &reports {
        println!("{}", r.summary());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("\nacceptance: {} passed, {} failed\n", reports.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
