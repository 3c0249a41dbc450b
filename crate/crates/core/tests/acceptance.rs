//! Runs the full acceptance suite and prints one line per criterion.
//! Slow; run with `cargo test --test acceptance -- --nocapture` to see the lines
//! even when everything passes.

use lpzeta::experiments::run_all_checks;

#[test]
fn acceptance_criteria() {
    let outcome = run_all_checks(|cfg| eprintln!("running {}", cfg.experiment.name()));
    for c in &outcome.criteria {
        let flag = if c.passed { "PASS" } else { "FAIL" };
        let limit = c.time_limit.map(|l| format!(", limit {l:.0} s")).unwrap_or_default();
        println!(
            "criterion {:>2}: {flag} {} ({} checks, {:.1} s{limit})",
            c.id, c.title, c.checks, c.seconds
        );
        for f in &c.failures {
            println!("    {f}");
        }
    }
    let failed: Vec<u8> = outcome.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
