//! Runs without the libtest harness so the per-criterion lines always print.

use std::process::ExitCode;
use std::time::Instant;

use transfinite::acceptance::{run_criterion, CRITERIA};
use transfinite::par::Strategy;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let r = run_criterion(id, Strategy::default());
        println!("{r}  ({:.1}s)", start.elapsed().as_secs_f64());
        if !r.pass {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} passed, {} failed",
        CRITERIA.len() - failed.len(),
        failed.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
