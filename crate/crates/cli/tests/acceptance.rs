//! Runs every acceptance criterion on its full corpus, prints one line per
//! criterion and fails if any criterion fails.

use std::process::ExitCode;

use ctlz::selftest::{run_all, Config};

fn main() -> ExitCode {
    println!("running {} acceptance criteria", ctlz::selftest::NAMES.len());
    let results = run_all(&Config::default(), &mut |r| println!("{}", r.line()));
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if results.len() == 10 && failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
