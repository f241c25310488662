//! Run the shipped load-balancing scenario end to end and write every run
//! artifact: trace, summary, and plot-ready datasets.
//!
//! ```bash
//! cargo run --release --example run_simulation -- [out-dir]
//! ```

use std::path::{Path, PathBuf};
use steersim::{config, engine, metrics};

fn main() {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "run-output".to_string()),
    );
    std::fs::create_dir_all(&out).expect("output directory");

    let cfg_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/paper-lb.toml");
    let cfg = config::load_validated(&cfg_path, None).expect("shipped config validates");
    let hash = config::config_hash(&cfg);
    println!("config {} (hash {hash})", cfg_path.display());
    println!(
        "{} users + AGV, {} s simulated at dt {} s",
        cfg.layout.static_users.len(),
        cfg.duration_s,
        cfg.dt_s
    );

    let started = std::time::Instant::now();
    let trace = engine::run(&cfg).expect("run succeeds");
    println!("simulated in {:?}", started.elapsed());

    let trace_path = out.join("trace.csv");
    metrics::write_trace(&trace, &trace_path).expect("trace written");
    let rows = metrics::read_trace(&trace_path).expect("trace reads back");

    let report = metrics::summarize(
        &rows,
        cfg.agv.user_id,
        cfg.policies.for_type(cfg.agv.traffic_type),
        &trace.stats,
        &hash,
    )
    .expect("summary");
    report
        .write(&out.join("summary.txt"))
        .expect("summary written");

    metrics::export_plot_data(
        &rows,
        cfg.agv.user_id,
        metrics::PlotKind::Fig4Style,
        &out.join("fig4-style.csv"),
    )
    .expect("plot data");
    metrics::export_plot_data(
        &rows,
        cfg.agv.user_id,
        metrics::PlotKind::WeightTimeline,
        &out.join("weights.csv"),
    )
    .expect("plot data");
    metrics::export_popularity(&trace.library, &out.join("popularity.csv")).expect("plot data");

    println!();
    print!("{}", report.render());
    println!();
    println!("artifacts in {}", out.display());
}
