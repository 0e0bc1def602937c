//! One PASS/FAIL line per acceptance criterion, at its stated tolerance and
//! time budget. Gating criteria decide the exit status; the extended one is
//! reported only. Set ACCEPTANCE_VERBOSE for the per-identity lines.

use std::process::ExitCode;

use genus_forge::suite::{run_suite, suite_passed, SuiteOptions, CRITERIA};

fn main() -> ExitCode {
    let ids: Vec<u32> = CRITERIA.iter().map(|c| c.id).collect();
    let outcomes = run_suite(&ids, &SuiteOptions::default());
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    println!("acceptance criteria");
    for o in &outcomes {
        println!(
            "[{}] criterion {:>2}: {} | tolerance: {} | {:.2?} of {}{}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.tolerance,
            o.elapsed,
            o.budget.map_or("no stated budget".to_string(), |b| format!("{b:?}")),
            if o.gating { "" } else { " | non-gating" }
        );
        if verbose || !o.passed {
            for l in &o.lines {
                println!("       {l}");
            }
        }
    }
    let ok = suite_passed(&outcomes);
    println!("acceptance: {}", if ok { "PASS" } else { "FAIL" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
