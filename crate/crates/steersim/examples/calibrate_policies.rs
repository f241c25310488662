//! Reproduce the calibrated benchmark policy pair.
//!
//! Grid-searches eligibility thresholds and normalization maxima against
//! the built-in benchmark telemetry snapshots (standard steering weights
//! held fixed), prints every check with its margin, and emits the winning
//! policy pair as a TOML fragment — the same values shipped in
//! `configs/table1.toml`.
//!
//! ```bash
//! cargo run --release --example calibrate_policies
//! ```

use steersim::benchmark::{calibrate, reference_cases};
use steersim::steering::SteeringPolicy;
use steersim::wat::Wat;

fn policy_toml(name: &str, policy: &SteeringPolicy) -> String {
    let mode = match policy.mode {
        steersim::steering::SteeringMode::LoadBalancing => "load-balancing",
        steersim::steering::SteeringMode::SplitDuplicate => "split-duplicate",
    };
    let w = &policy.weights;
    let m = &policy.maxima;
    // Thresholds are uniform across WATs by construction of the search.
    let t = policy.thresholds.get(Wat::FiveG);
    format!(
        "[policy.{name}]\nmode = \"{mode}\"\n\
         weights = {{ sinr = {}, buffer = {}, delay = {} }}\n\
         maxima = {{ sinr_db = {}, buffer_pct = {}, delay_ms = {} }}\n\
         thresholds = {{ sinr_db = {}, buffer_pct = {}, delay_ms = {} }}\n",
        w.sinr,
        w.buffer,
        w.delay,
        m.sinr_db,
        m.buffer_pct,
        m.delay_ms,
        t.sinr_db,
        t.buffer_pct,
        t.delay_ms,
    )
}

fn main() {
    println!("benchmark snapshots:");
    for case in reference_cases() {
        println!("  {:10} mode {:?}", case.name, case.mode);
    }
    println!();

    let (policies, results) = calibrate();
    println!("calibration checks:");
    let mut passed = 0;
    for r in &results {
        println!(
            "  [{}] {:10} {:28} margin {:+.4} {}",
            if r.passed { "pass" } else { "FAIL" },
            r.case,
            r.check,
            r.margin,
            r.detail,
        );
        passed += r.passed as usize;
    }
    println!("\n{passed}/{} checks pass", results.len());
    println!("\ncalibrated policy pair:\n");
    println!("{}", policy_toml("embb", &policies.embb));
    println!("{}", policy_toml("urllc", &policies.urllc));
}
