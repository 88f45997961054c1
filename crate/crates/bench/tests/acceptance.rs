//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use moment_info_bench::acceptance::CRITERIA;

fn main() -> ExitCode {
    let mut passed = 0;
    for c in &CRITERIA {
        let o = c.run();
        println!("{o}");
        passed += usize::from(o.passed);
    }
    println!("{passed}/{} criteria passed", CRITERIA.len());
    if passed == CRITERIA.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
