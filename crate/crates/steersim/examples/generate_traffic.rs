//! Generate a Poisson/Zipf request workload and export it as CSV.
//!
//! ```bash
//! cargo run --release --example generate_traffic -- [out.csv]
//! ```

use steersim::seed::stream_rng;
use steersim::traffic::{generate_requests, ArrivalConfig, ContentLibrary};
use steersim::wat::UserId;

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "requests.csv".to_string());

    let mut rng = stream_rng(42, "library", 0);
    let library = ContentLibrary::generate(1000, 0.8, 500_000, 20_000_000, &mut rng)
        .expect("valid library parameters");
    let users: Vec<UserId> = (1..=100).map(UserId).collect();
    let cfg = ArrivalConfig {
        lambda_per_s: 2.0,
        horizon_s: 600.0,
        seed: 42,
    };
    let stream = generate_requests(&cfg, &library, &users).expect("valid arrival config");

    println!(
        "{} requests over {} s (lambda = {}/s)",
        stream.len(),
        cfg.horizon_s,
        cfg.lambda_per_s
    );

    let total_bytes: u64 = stream.requests.iter().map(|r| r.size_bytes).sum();
    println!("offered volume: {:.2} GB", total_bytes as f64 / 1e9);

    // Popularity skew in action: how often the top-ranked files appear.
    let mut top = [0usize; 3];
    for r in &stream.requests {
        if (r.file_id as usize) <= top.len() {
            top[(r.file_id - 1) as usize] += 1;
        }
    }
    for (i, n) in top.iter().enumerate() {
        println!(
            "file {} requested {n} times ({:.1} % of requests, pmf {:.4})",
            i + 1,
            100.0 * *n as f64 / stream.len() as f64,
            library.popularity[i],
        );
    }

    stream
        .write_csv(std::path::Path::new(&out))
        .expect("writable output");
    println!("stream written to {out}");
}
