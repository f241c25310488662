//! Deterministic simulator of an indoor factory served simultaneously by
//! 5G NR, Wi-Fi, and LiFi, with a utility-based traffic steering engine.
//!
//! Per user and per access technology, live telemetry (SINR, access-node
//! buffer occupancy, transmission delay) is scored through a logarithmic
//! utility; traffic is then either split across technologies by percentage
//! weights (load-balancing, used for eMBB flows) or duplicated onto every
//! technology with positive utility (split/duplicate, used for URLLC).
//!
//! The crate is a library first. Each major capability has a runnable
//! example:
//!
//! ```text
//! cargo run --release --example steering_decisions   # score telemetry by hand
//! cargo run --release --example generate_traffic     # Poisson/Zipf workload CSV
//! cargo run --release --example radio_coverage       # per-WAT link profile along the AGV path
//! cargo run --release --example run_simulation       # full run: trace + summary
//! cargo run --release --example threshold_sweep      # eligibility threshold sweep
//! cargo run --release --example calibrate_policies   # policy calibration search
//! ```
//!
//! A thin `steersim` binary wraps the same library functions behind
//! `run`, `sweep`, `validate-config`, `summarize`, and `gen-traffic`
//! subcommands; see the README for the config file schema.

pub mod benchmark;
pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod queueing;
pub mod radio;
pub mod seed;
pub mod steering;
pub mod traffic;
pub mod wat;

pub use error::{Error, Result};
pub use wat::{NodeId, PerWat, UserId, Wat};
