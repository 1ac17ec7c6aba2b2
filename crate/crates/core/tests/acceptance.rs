//! The eight acceptance criteria at full size. Prints one line per
//! criterion and exits nonzero if any fails. Runs without the libtest
//! harness so the lines are never captured.

use std::process::ExitCode;

use gefp_lab::verify::{acceptance, Level};

fn main() -> ExitCode {
    let reports = acceptance(Level::Desk);
    for r in &reports {
        println!("{}  [{:.1}s]", r.line(), r.elapsed.as_secs_f64());
        for f in r.failures.iter().skip(1) {
            println!("    also: {f}");
        }
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", reports.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
