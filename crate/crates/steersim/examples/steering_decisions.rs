//! Score hand-fed telemetry and print the resulting steering decisions.
//!
//! Walks one telemetry snapshot through both steering modes: per-parameter
//! utilities, the composite score, eligibility, and the final weights or
//! duplication set.
//!
//! ```bash
//! cargo run --release --example steering_decisions
//! ```

use steersim::steering::{
    decide_user, rounded_weights, NormalizationMaxima, ParamThresholds, ParamWeights,
    SteeringDecision, SteeringMode, SteeringPolicy, TelemetrySample,
};
use steersim::wat::{PerWat, UserId, Wat};

fn telemetry(wat: Wat, sinr_db: f64, buffer_pct: f64, delay_ms: f64) -> Option<TelemetrySample> {
    Some(TelemetrySample {
        wat,
        cell_id: 1,
        rsrp_dbm: -85.0,
        sinr_db,
        buffer_pct,
        delay_ms,
        timestamp_s: 0.0,
    })
}

fn print_decision(label: &str, d: &SteeringDecision) {
    println!("{label}:");
    for wat in Wat::ALL {
        let b = d.breakdowns.get(wat);
        print!(
            "  {:5}  u_sinr {:.3}  u_buffer {:.3}  u_delay {:.3}  overall {:+.3}  {}",
            wat.label(),
            b.u_sinr,
            b.u_buffer,
            b.u_delay,
            b.overall,
            if b.eligible { "eligible" } else { "gated" },
        );
        match (&d.lb_weights, &d.sd_selection) {
            (Some(w), _) => println!("  -> weight {:.1} %", w.get(wat)),
            (_, Some(sel)) => println!("  -> {}", if *sel.get(wat) { "duplicate" } else { "skip" }),
            _ => println!(),
        }
    }
    if let Some(w) = &d.lb_weights {
        if !d.degenerate {
            let r = rounded_weights(w);
            println!(
                "  display row: {} / {} / {} (integers, sum {})",
                r.five_g,
                r.wifi,
                r.lifi,
                r.five_g + r.wifi + r.lifi
            );
        }
    }
    if d.degenerate {
        println!("  (degenerate: no WAT has positive utility; traffic falls back to best SINR)");
    }
    println!();
}

fn main() {
    let maxima = NormalizationMaxima {
        sinr_db: 40.0,
        buffer_pct: 100.0,
        delay_ms: 100.0,
    };
    let thresholds = ParamThresholds {
        sinr_db: 0.0,
        buffer_pct: 60.0,
        delay_ms: 60.0,
    };

    let lb_policy = SteeringPolicy::uniform(
        SteeringMode::LoadBalancing,
        ParamWeights {
            sinr: 1.0,
            buffer: 0.7,
            delay: 0.2,
        },
        thresholds,
        maxima,
    );
    let sd_policy = SteeringPolicy::uniform(
        SteeringMode::SplitDuplicate,
        ParamWeights {
            sinr: 0.5,
            buffer: 0.2,
            delay: 1.0,
        },
        thresholds,
        maxima,
    );

    // A strong 5G link, a buffer-loaded Wi-Fi AP, and a clean LiFi cell.
    let samples = PerWat::new(
        telemetry(Wat::FiveG, 29.0, 8.0, 14.0),
        telemetry(Wat::WiFi, 9.0, 27.0, 6.0),
        telemetry(Wat::LiFi, 9.0, 8.0, 2.0),
    );

    let lb = decide_user(&samples, &lb_policy, UserId(0)).expect("valid telemetry");
    print_decision("load balancing (eMBB)", &lb);

    let sd = decide_user(&samples, &sd_policy, UserId(0)).expect("valid telemetry");
    print_decision("split/duplicate (URLLC)", &sd);

    // Same spot, but Wi-Fi's buffer fills up and 5G's delay explodes.
    let degraded = PerWat::new(
        telemetry(Wat::FiveG, 29.0, 8.0, 95.0),
        telemetry(Wat::WiFi, 9.0, 85.0, 6.0),
        telemetry(Wat::LiFi, 9.0, 8.0, 2.0),
    );
    let lb = decide_user(&degraded, &lb_policy, UserId(0)).expect("valid telemetry");
    print_decision("load balancing after congestion", &lb);

    // No LiFi coverage at all: the WAT is simply gated.
    let mut partial = degraded;
    partial.lifi = None;
    let lb = decide_user(&partial, &lb_policy, UserId(0)).expect("valid telemetry");
    print_decision("load balancing without LiFi coverage", &lb);
}
