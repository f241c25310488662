//! Sweep the normalized eligibility threshold and compare how much traffic
//! each WAT receives and how often decisions degenerate.
//!
//! Raising the threshold makes the eligibility gate stricter; the per-WAT
//! steering shares and the degenerate-epoch count respond directly.
//!
//! ```bash
//! cargo run --release --example threshold_sweep
//! ```

use std::path::Path;
use steersim::engine::{sweep, SweepSpec};
use steersim::metrics;
use steersim::wat::Wat;
use steersim::{config, metrics::read_trace};

fn main() {
    let cfg_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/paper-lb.toml");
    let mut base = config::load_validated(&cfg_path, None).expect("shipped config validates");
    base.duration_s = 200.0;

    let points: Vec<SweepSpec> = [0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|&q| SweepSpec::NormalizedThreshold(q))
        .collect();

    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>12} {:>12}",
        "threshold", "share_5g", "share_wifi", "share_lifi", "degenerate", "corr_5g"
    );
    let dir = tempfile::tempdir().expect("tempdir");
    for (spec, result) in sweep(&base, &points) {
        let trace = match result {
            Ok(t) => t,
            Err(e) => {
                println!("{:>10} failed: {e}", spec.label());
                continue;
            }
        };
        let path = dir.path().join(format!("{}.csv", spec.label()));
        metrics::write_trace(&trace, &path).expect("trace written");
        let rows = read_trace(&path).expect("trace reads back");
        let q = match spec {
            SweepSpec::NormalizedThreshold(q) => q,
            _ => unreachable!(),
        };
        let policy = steersim::steering::SteeringPolicy::from_normalized_threshold(
            base.policies.embb.mode,
            base.policies.embb.weights,
            q,
            base.policies.embb.maxima,
        )
        .expect("valid threshold");
        let report = metrics::summarize(&rows, base.agv.user_id, &policy, &trace.stats, "")
            .expect("summary");
        let share = |wat: Wat| {
            let series = report.agv_weight_series.get(wat);
            let known: Vec<f64> = series.iter().flatten().copied().collect();
            known.iter().sum::<f64>() / known.len().max(1) as f64
        };
        println!(
            "{:>10.1} {:>10.1} {:>10.1} {:>10.1} {:>12} {:>12}",
            q,
            share(Wat::FiveG),
            share(Wat::WiFi),
            share(Wat::LiFi),
            report.stats.degenerate_epoch_decisions,
            report
                .rank_corr_sinr_weight_5g
                .map(|c| format!("{c:.3}"))
                .unwrap_or_else(|| "undefined".into()),
        );
    }
}
