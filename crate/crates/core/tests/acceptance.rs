//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the table is printed even when everything passes; the criteria
//! run in order so the two sharing the L = 20 TSFD run compute it once.

use std::process::ExitCode;

use gpvortex::verify::Suite;

fn main() -> ExitCode {
    let suite = Suite::new();
    let mut failed = Vec::new();
    for id in 1..=11 {
        let report = suite.run(id);
        println!("{}", report.line());
        if !report.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: 11/11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
