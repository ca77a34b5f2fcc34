//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! followed by the individual measurements.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use mzsplit::bench::checks::{self, CheckOutcome};
use mzsplit::Result;

fn cache() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("reference-cache")
}

fn report(id: u32, name: &str, budget: Option<Duration>, run: impl FnOnce() -> Result<Vec<CheckOutcome>>) {
    let start = Instant::now();
    let outcomes = run().expect("check ran");
    let took = start.elapsed();
    let in_time = budget.is_none_or(|b| took <= b);
    let passed = in_time && outcomes.iter().all(|c| c.passed);
    let mut text = format!("[{}] criterion {id}: {name} ({took:.2?})\n", if passed { "PASS" } else { "FAIL" });
    for c in &outcomes {
        let _ = writeln!(text, "    {c}");
    }
    if let Some(b) = budget.filter(|_| !in_time) {
        let _ = writeln!(text, "    over the {b:?} budget");
    }
    // straight to stderr so the line shows for passing tests too
    let _ = std::io::stderr().lock().write_all(text.as_bytes());
    assert!(passed, "criterion {id} ({name}) failed");
}

#[test]
fn criterion_1_commutator_identities() {
    report(1, "commutator identities", Some(Duration::from_secs(10)), || {
        Ok(vec![checks::commutator_identities(&[64, 256], 11)?])
    });
}

#[test]
fn criterion_2_sbch_order() {
    report(2, "sBCH truncation order", Some(Duration::from_secs(1)), || Ok(vec![checks::sbch_order(5)?]));
}

#[test]
fn criterion_3_splitting_vs_magnus() {
    report(3, "splitting vs Magnus oracle", Some(Duration::from_secs(30)), checks::splitting_vs_magnus);
}

#[test]
fn criterion_4_global_orders() {
    report(4, "global convergence orders", Some(Duration::from_secs(120)), || checks::global_orders(0));
}

#[test]
fn criterion_5_integral_scaling() {
    report(5, "time-integral scaling", Some(Duration::from_secs(5)), || {
        let mut v = checks::integral_scaling()?;
        v.push(checks::parity_reconstruction()?);
        Ok(v)
    });
}

#[test]
fn criterion_6_unitarity() {
    report(6, "unitarity", Some(Duration::from_secs(60)), || checks::unitarity(1000));
}

#[test]
fn criterion_7_large_step_table() {
    report(7, "large-step table", None, || checks::large_step_table(Some(&cache())));
}

#[test]
fn criterion_8_large_step_robustness() {
    report(8, "large-step robustness", None, || checks::large_step(Some(&cache())));
}

#[test]
fn criterion_9_time_independent_reduction() {
    report(9, "time-independent reduction", None, checks::time_independent_reduction);
}
