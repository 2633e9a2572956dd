//! Runs every registered experiment with default parameters and prints one line per
//! acceptance criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use multiplier_lab::experiments::{run_default, EXPERIMENTS};

/// Wall-clock budget per criterion, in seconds.
const BUDGETS: [(u32, f64); 17] = [
    (1, 1.0),
    (2, 10.0),
    (3, 30.0),
    (4, 5.0),
    (5, 5.0),
    (6, 1.0),
    (7, 5.0),
    (8, 60.0),
    (9, 120.0),
    (10, 5.0),
    (11, 1.0),
    (12, 5.0),
    (13, 60.0),
    (14, 120.0),
    (15, 60.0),
    (16, 60.0),
    (17, 1.0),
];

fn budget(criterion: u32) -> Duration {
    let secs = BUDGETS.iter().find(|(c, _)| *c == criterion).map_or(0.0, |b| b.1);
    Duration::from_secs_f64(secs)
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    for entry in EXPERIMENTS {
        let start = Instant::now();
        let result = run_default(entry.name, 0);
        let elapsed = start.elapsed();
        let limit = budget(entry.criterion);
        let in_time = elapsed <= limit;
        let (ok, detail) = match &result {
            Ok(rep) => {
                let failing: Vec<String> = rep
                    .failing()
                    .map(|r| format!("{}: {} {} {}", r.criterion, r.measured, r.comparison.symbol(), r.threshold))
                    .collect();
                (rep.passed(), if failing.is_empty() { String::new() } else { format!(" [{}]", failing.join("; ")) })
            }
            Err(e) => (false, format!(" [error: {e}]")),
        };
        let pass = ok && in_time;
        // written to the handle directly so the lines survive libtest's output capture
        writeln!(
            std::io::stdout().lock(),
            "{} criterion {:>2} {:<20} {:>8.2}s / {:>5.0}s{}{}",
            if pass { "PASS" } else { "FAIL" },
            entry.criterion,
            entry.name,
            elapsed.as_secs_f64(),
            limit.as_secs_f64(),
            if in_time { "" } else { " (over budget)" },
            detail,
        )
        .unwrap();
        if !pass {
            failures.push(entry.criterion);
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
