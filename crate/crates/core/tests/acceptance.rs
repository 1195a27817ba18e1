//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

use std::process::ExitCode;

use tdesign::suite::{verify_all, SuiteConfig};

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    let outcome = match verify_all(&SuiteConfig::default()) {
        Ok(o) => o,
        Err(e) => {
            println!("FAIL suite aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    for c in &outcome.criteria {
        println!("{} criterion {:>2}: {}", if c.pass() { "PASS" } else { "FAIL" }, c.id, c.title);
        for r in c.reports.iter().filter(|r| !r.pass) {
            println!("       {} [{}; {}]: got {}, expected {}", r.claim, r.method, r.params, r.value, r.expected);
        }
    }
    let passed = outcome.criteria.iter().filter(|c| c.pass()).count();
    println!("{passed}/{} criteria passed in {:.1}s", outcome.criteria.len(), start.elapsed().as_secs_f64());
    if outcome.pass() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
