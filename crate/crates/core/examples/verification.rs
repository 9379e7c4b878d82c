//! Runs every verification suite with the default seed and prints one line
//! per check.

use forcenoise::verify::{run_suite, Suite, DEFAULT_SEED};

fn main() {
    let checks = run_suite(Suite::All, DEFAULT_SEED);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
}
