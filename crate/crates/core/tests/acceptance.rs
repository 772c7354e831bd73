//! Runs every acceptance criterion and prints one line per criterion.

use ballexp::corpus::run_criteria;
use ballexp::Caps;

#[test]
fn acceptance_suite() {
    let results = run_criteria(None, &Caps::default()).unwrap();
    for r in &results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let msg = r.error.as_deref().unwrap_or(&r.detail);
        println!("{:<4} {verdict} {:>7} ms  {}: {msg}", r.id, r.elapsed_ms, r.title);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
