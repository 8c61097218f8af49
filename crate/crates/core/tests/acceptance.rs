//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use hk_core::oracle::acceptance::{run_all, Level, Status};
use hk_core::oracle::DEFAULT_SEED;

fn main() {
    // `cargo test -- --list` and filters from other targets pass through here.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let outcomes = run_all(Level::Full, DEFAULT_SEED);
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes
        .iter()
        .filter(|o| o.status != Status::Pass)
        .map(|o| o.id)
        .collect();
    if failed.is_empty() {
        println!(
            "acceptance: {} of {} criteria pass",
            outcomes.len(),
            outcomes.len()
        );
    } else {
        println!("acceptance: criteria not met: {failed:?}");
        std::process::exit(1);
    }
}
