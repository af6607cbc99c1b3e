//! `selftest`: run the invariant suite and report one line per check.

use photonic_qgan::selftest;

pub fn run() -> anyhow::Result<()> {
    let results = selftest::run();
    let mut failures = 0;
    for result in &results {
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} {name}: {details}",
            name = result.name,
            details = result.details
        );
        if !result.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        anyhow::bail!("{failures} of {} checks failed", results.len());
    }
    println!("selftest: all {} checks passed", results.len());
    Ok(())
}
