//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod criteria;
mod gen;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn check(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let all: [Criterion; 9] = [
        ("KKT suite", criteria::kkt_suite),
        ("certified competitiveness", criteria::certified_competitiveness),
        ("dual feasibility", criteria::dual_feasibility),
        ("body chasing", criteria::body_chasing),
        ("set cover rounding", criteria::set_cover),
        ("matching rounding", criteria::matching),
        ("spanning tree rounding", criteria::spanning_tree),
        ("offline oracle", criteria::offline_oracle),
        ("determinism", criteria::determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in all.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::check(false, format!("panicked: {msg}"))
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} ({}; {:.2}s)",
            k + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
