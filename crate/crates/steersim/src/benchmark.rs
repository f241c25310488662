//! Benchmark decision snapshots and policy calibration.
//!
//! Six telemetry snapshots (three AGV positions, each captured once under
//! load-balancing load conditions and once under split/duplicate load
//! conditions) come with expected steering outcomes. They serve as
//! regression targets: `evaluate` scores a policy pair against every
//! expectation with a margin, and `calibrate` grid-searches eligibility
//! thresholds and normalization maxima — with the standard steering weights
//! held fixed — for the policy pair that passes the most checks with the
//! widest minimum margin. Delay readings in the snapshots are
//! reporting-capped at 100 ms.

use crate::engine::PoliciesByType;
use crate::steering::{
    decide_user, NormalizationMaxima, ParamThresholds, ParamWeights, SteeringMode, SteeringPolicy,
    TelemetrySample,
};
use crate::wat::{PerWat, UserId, Wat};

/// Steering weights used by the benchmark runs: SINR-led for
/// load balancing, delay-led for split/duplicate.
pub fn benchmark_weights(mode: SteeringMode) -> ParamWeights {
    match mode {
        SteeringMode::LoadBalancing => ParamWeights {
            sinr: 1.0,
            buffer: 0.7,
            delay: 0.2,
        },
        SteeringMode::SplitDuplicate => ParamWeights {
            sinr: 0.5,
            buffer: 0.2,
            delay: 1.0,
        },
    }
}

fn sample(wat: Wat, cell: u32, rsrp: f64, sinr: f64, buffer: f64, delay: f64) -> TelemetrySample {
    TelemetrySample {
        wat,
        cell_id: cell,
        rsrp_dbm: rsrp,
        sinr_db: sinr,
        buffer_pct: buffer,
        delay_ms: delay,
        timestamp_s: 0.0,
    }
}

/// One snapshot plus its expected outcome.
#[derive(Clone, Debug)]
pub struct ReferenceCase {
    pub name: &'static str,
    pub mode: SteeringMode,
    pub telemetry: PerWat<TelemetrySample>,
    pub expectation: Expectation,
}

#[derive(Clone, Debug)]
pub enum Expectation {
    /// Weight ordering with every WAT positive; `target` is the reference
    /// percentage triple.
    LbOrdering { order: [Wat; 3], target: [f64; 3] },
    /// One WAT gets exactly zero; the other two split the weight evenly
    /// (within `split_tolerance` points of 50 each).
    LbExclusiveSplit {
        zero: Wat,
        split_tolerance: f64,
        target: [f64; 3],
    },
    /// One WAT receives the strictly largest (positive) weight.
    LbMaximum { max: Wat, target: [f64; 3] },
    /// Exactly this duplication set.
    SdSelection { selected: [bool; 3] },
}

/// The snapshot fixture. Cell ids, signal power, SINR, buffer occupancy,
/// and (capped) delay per WAT; the second variant of each position differs
/// in buffer and delay because the background load realization differs
/// between runs.
pub fn reference_cases() -> Vec<ReferenceCase> {
    use Wat::{FiveG, LiFi, WiFi};
    vec![
        ReferenceCase {
            name: "pos1-lb",
            mode: SteeringMode::LoadBalancing,
            telemetry: PerWat::new(
                sample(FiveG, 1, -77.0, 29.0, 8.0, 14.0),
                sample(WiFi, 1, -101.0, 9.0, 27.0, 6.0),
                sample(LiFi, 4, -100.0, 9.0, 8.0, 2.0),
            ),
            expectation: Expectation::LbOrdering {
                order: [FiveG, LiFi, WiFi],
                target: [49.0, 22.0, 29.0],
            },
        },
        ReferenceCase {
            name: "pos1-sd",
            mode: SteeringMode::SplitDuplicate,
            telemetry: PerWat::new(
                sample(FiveG, 1, -77.0, 29.0, 17.0, 18.0),
                sample(WiFi, 1, -101.0, 9.0, 64.0, 9.0),
                sample(LiFi, 4, -100.0, 9.0, 8.0, 2.0),
            ),
            expectation: Expectation::SdSelection {
                selected: [true, true, true],
            },
        },
        ReferenceCase {
            name: "pos2-lb",
            mode: SteeringMode::LoadBalancing,
            telemetry: PerWat::new(
                sample(FiveG, 3, -102.0, 4.0, 9.0, 100.0),
                sample(WiFi, 2, -99.0, 10.0, 51.0, 3.0),
                sample(LiFi, 15, -102.0, 5.0, 7.0, 100.0),
            ),
            expectation: Expectation::LbExclusiveSplit {
                zero: WiFi,
                split_tolerance: 2.0,
                target: [50.0, 0.0, 50.0],
            },
        },
        ReferenceCase {
            name: "pos2-sd",
            mode: SteeringMode::SplitDuplicate,
            telemetry: PerWat::new(
                sample(FiveG, 3, -102.0, 4.0, 14.0, 89.0),
                sample(WiFi, 2, -99.0, 10.0, 65.0, 10.0),
                sample(LiFi, 15, -102.0, 5.0, 8.0, 100.0),
            ),
            expectation: Expectation::SdSelection {
                selected: [false, true, false],
            },
        },
        ReferenceCase {
            name: "pos3-lb",
            mode: SteeringMode::LoadBalancing,
            telemetry: PerWat::new(
                sample(FiveG, 6, -90.0, 16.0, 10.0, 41.0),
                sample(WiFi, 4, -79.0, 30.0, 68.0, 3.0),
                sample(LiFi, 37, -100.0, 10.0, 10.0, 3.0),
            ),
            expectation: Expectation::LbMaximum {
                max: WiFi,
                target: [23.0, 48.0, 28.0],
            },
        },
        ReferenceCase {
            name: "pos3-sd",
            mode: SteeringMode::SplitDuplicate,
            telemetry: PerWat::new(
                sample(FiveG, 6, -90.0, 16.0, 21.0, 26.0),
                sample(WiFi, 4, -79.0, 30.0, 100.0, 4.0),
                sample(LiFi, 37, -100.0, 10.0, 7.0, 2.0),
            ),
            expectation: Expectation::SdSelection {
                selected: [false, true, true],
            },
        },
    ]
}

/// One expectation sub-check: positive margin means it holds.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub case: &'static str,
    pub check: String,
    pub margin: f64,
    pub passed: bool,
    pub detail: String,
}

fn weight_triple(w: &PerWat<f64>) -> [f64; 3] {
    [w.five_g, w.wifi, w.lifi]
}

/// Score one policy pair against every reference expectation.
pub fn evaluate(policies: &PoliciesByType) -> Vec<CheckResult> {
    let mut results = Vec::new();
    for case in reference_cases() {
        let policy = match case.mode {
            SteeringMode::LoadBalancing => &policies.embb,
            SteeringMode::SplitDuplicate => &policies.urllc,
        };
        let samples = case.telemetry.map(|_, s| Some(*s));
        let decision = decide_user(&samples, policy, UserId(0)).expect("valid benchmark case");
        let overall = decision.breakdowns.map(|_, b| b.overall);
        let mut push = |check: String, margin: f64, detail: String| {
            results.push(CheckResult {
                case: case.name,
                check,
                margin,
                passed: margin > 0.0,
                detail,
            });
        };
        match case.expectation {
            Expectation::LbOrdering { order, target } => {
                let w = decision.lb_weights.expect("lb case");
                let [first, second, third] = order;
                push(
                    format!("{} > {}", first.label(), second.label()),
                    overall.get(first) - overall.get(second),
                    format!("weights {:.1?} target {target:.1?}", weight_triple(&w)),
                );
                push(
                    format!("{} > {}", second.label(), third.label()),
                    overall.get(second) - overall.get(third),
                    String::new(),
                );
                push(
                    "all positive".to_string(),
                    Wat::ALL
                        .iter()
                        .map(|&t| *overall.get(t))
                        .fold(f64::INFINITY, f64::min),
                    String::new(),
                );
            }
            Expectation::LbExclusiveSplit {
                zero,
                split_tolerance,
                target,
            } => {
                let w = decision.lb_weights.expect("lb case");
                push(
                    format!("{} weight exactly 0", zero.label()),
                    -overall.get(zero),
                    format!("weights {:.1?} target {target:.1?}", weight_triple(&w)),
                );
                let others: Vec<Wat> = Wat::ALL.iter().copied().filter(|&t| t != zero).collect();
                for &t in &others {
                    push(
                        format!("{} positive", t.label()),
                        *overall.get(t),
                        String::new(),
                    );
                }
                let split_margin = others
                    .iter()
                    .map(|&t| split_tolerance - (w.get(t) - 50.0).abs())
                    .fold(f64::INFINITY, f64::min);
                push(
                    format!("even split within {split_tolerance}"),
                    split_margin,
                    format!("weights {:.1?}", weight_triple(&w)),
                );
            }
            Expectation::LbMaximum { max, target } => {
                let w = decision.lb_weights.expect("lb case");
                let rival = Wat::ALL
                    .iter()
                    .copied()
                    .filter(|&t| t != max)
                    .map(|t| *overall.get(t))
                    .fold(f64::NEG_INFINITY, f64::max);
                push(
                    format!("{} has the largest weight", max.label()),
                    overall.get(max) - rival,
                    format!("weights {:.1?} target {target:.1?}", weight_triple(&w)),
                );
                push(
                    format!("{} positive", max.label()),
                    *overall.get(max),
                    String::new(),
                );
            }
            Expectation::SdSelection { selected } => {
                let sel = decision.sd_selection.expect("sd case");
                for (i, &wat) in Wat::ALL.iter().enumerate() {
                    let eligible = decision.breakdowns.get(wat).eligible;
                    let margin = if selected[i] {
                        if eligible {
                            *overall.get(wat)
                        } else {
                            -1.0
                        }
                    } else if !eligible {
                        1.0
                    } else {
                        -overall.get(wat)
                    };
                    push(
                        format!(
                            "{} {}",
                            wat.label(),
                            if selected[i] {
                                "selected"
                            } else {
                                "not selected"
                            }
                        ),
                        margin,
                        format!("selected={}", sel.get(wat)),
                    );
                }
            }
        }
    }
    results
}

/// Lexicographic score: checks passed first, then the smallest margin among
/// the passing checks (robustness of the frozen config).
fn score(results: &[CheckResult]) -> (usize, f64) {
    let passed = results.iter().filter(|r| r.passed).count();
    let min_passed = results
        .iter()
        .filter(|r| r.passed)
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    (passed, min_passed)
}

/// Grid-search calibration over normalization maxima (both modes) and the
/// split/duplicate delay threshold. Weights stay at `benchmark_weights`;
/// the load-balancing gate is fixed at (0 dB, 80 %, 150 ms) and the
/// split/duplicate gate at (0 dB, 110 %) with the delay bound swept.
/// Returns the winning policy pair and its evaluation.
pub fn calibrate() -> (PoliciesByType, Vec<CheckResult>) {
    let lb_thresholds = ParamThresholds {
        sinr_db: 0.0,
        buffer_pct: 80.0,
        delay_ms: 150.0,
    };
    // The two sides are searched independently; each candidate is paired
    // with a mode-correct placeholder so every case stays evaluable.
    let placeholder_maxima = NormalizationMaxima {
        sinr_db: 40.0,
        buffer_pct: 100.0,
        delay_ms: 100.0,
    };
    let sd_placeholder = SteeringPolicy::uniform(
        SteeringMode::SplitDuplicate,
        benchmark_weights(SteeringMode::SplitDuplicate),
        ParamThresholds {
            sinr_db: 0.0,
            buffer_pct: 110.0,
            delay_ms: 20.0,
        },
        placeholder_maxima,
    );
    let lb_placeholder = SteeringPolicy::uniform(
        SteeringMode::LoadBalancing,
        benchmark_weights(SteeringMode::LoadBalancing),
        lb_thresholds,
        placeholder_maxima,
    );

    // Load-balancing side.
    let mut best_lb: Option<(SteeringPolicy, (usize, f64))> = None;
    for sinr_max in [20.0, 25.0, 30.0, 35.0, 40.0, 45.0] {
        for buffer_max in (300..=2000).step_by(50) {
            for delay_max in (450..=1200).step_by(25) {
                let policy = SteeringPolicy::uniform(
                    SteeringMode::LoadBalancing,
                    benchmark_weights(SteeringMode::LoadBalancing),
                    lb_thresholds,
                    NormalizationMaxima {
                        sinr_db: sinr_max,
                        buffer_pct: buffer_max as f64,
                        delay_ms: delay_max as f64,
                    },
                );
                let pair = PoliciesByType {
                    embb: policy,
                    urllc: sd_placeholder,
                };
                let results: Vec<CheckResult> = evaluate(&pair)
                    .into_iter()
                    .filter(|r| r.case.ends_with("lb"))
                    .collect();
                let s = score(&results);
                if best_lb.as_ref().is_none_or(|(_, bs)| s > *bs) {
                    best_lb = Some((policy, s));
                }
            }
        }
    }
    let lb = best_lb.expect("non-empty grid").0;

    // Split/duplicate side.
    let mut best_sd: Option<(SteeringPolicy, (usize, f64))> = None;
    for delay_gate in 19..=25 {
        for sinr_max in [10.0, 15.0, 20.0, 25.0, 30.0, 40.0] {
            for norm_max in (1000..=10_000).step_by(500) {
                let policy = SteeringPolicy::uniform(
                    SteeringMode::SplitDuplicate,
                    benchmark_weights(SteeringMode::SplitDuplicate),
                    ParamThresholds {
                        sinr_db: 0.0,
                        buffer_pct: 110.0,
                        delay_ms: delay_gate as f64,
                    },
                    NormalizationMaxima {
                        sinr_db: sinr_max,
                        buffer_pct: norm_max as f64,
                        delay_ms: norm_max as f64,
                    },
                );
                let pair = PoliciesByType {
                    embb: lb_placeholder,
                    urllc: policy,
                };
                let results: Vec<CheckResult> = evaluate(&pair)
                    .into_iter()
                    .filter(|r| r.case.ends_with("sd"))
                    .collect();
                let s = score(&results);
                if best_sd.as_ref().is_none_or(|(_, bs)| s > *bs) {
                    best_sd = Some((policy, s));
                }
            }
        }
    }
    let sd = best_sd.expect("non-empty grid").0;

    let pair = PoliciesByType {
        embb: lb,
        urllc: sd,
    };
    let results = evaluate(&pair);
    (pair, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_well_formed() {
        let cases = reference_cases();
        assert_eq!(cases.len(), 6);
        for case in &cases {
            for (wat, s) in case.telemetry.iter() {
                assert_eq!(s.wat, wat);
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn calibration_is_deterministic() {
        let (a, _) = calibrate();
        let (b, _) = calibrate();
        assert_eq!(a.embb, b.embb);
        assert_eq!(a.urllc, b.urllc);
    }

    #[test]
    fn calibrated_pair_passes_the_feasible_checks() {
        let (_, results) = calibrate();
        // The split/duplicate side holds everywhere; on the load-balancing
        // side every ordering check holds. The even-split expectation of
        // pos2 cannot hold together with the pos1/pos3 orderings under this
        // utility shape (see the acceptance suite), so pos2-lb positivity
        // and split checks are the only permitted failures.
        for r in &results {
            let exempt = r.case == "pos2-lb" && r.check != "wifi weight exactly 0";
            if !exempt {
                assert!(
                    r.passed,
                    "{} / {} failed with margin {} ({})",
                    r.case, r.check, r.margin, r.detail
                );
            }
        }
    }
}
