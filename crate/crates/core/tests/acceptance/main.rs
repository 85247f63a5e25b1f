//! Acceptance suite: one pass/fail line per criterion.

mod churn;
mod common;
mod decode;
mod lower;
mod stats;
mod structure;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(u32, &str, Check, u64); 10] = [
        (1, "zero-error R2-D2", decode::r2d2_zero_error, 60),
        (2, "zero-error C3-P0", decode::c3p0_zero_error, 120),
        (3, "WUP failure bound", stats::wup_bound, 300),
        (4, "SUP failure bound and strong universality", stats::sup_bound, 300),
        (5, "Schwartz-Zippel with mixed set sizes", structure::schwartz_zippel, 60),
        (6, "transformation invariants", structure::transform_invariants, 600),
        (7, "robustness under churn", churn::robustness, 600),
        (8, "ID protocol", structure::id_protocol, 600),
        (9, "lower-bound family", lower::lower_bound_trend, 600),
        (10, "header framing", structure::header_framing, 600),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (n, name, check, budget) in criteria {
        if filter.is_some_and(|f| f != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("{d}; over the {budget}s budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{:.1}s]", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why} [{:.1}s]", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
