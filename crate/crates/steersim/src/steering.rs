//! Utility-based steering decisions.
//!
//! Each access technology is scored from live telemetry (SINR, access-node
//! buffer occupancy, transmission delay) through a logarithmic utility
//! curve, then either percentage weights (load-balancing mode) or a
//! duplication set (split/duplicate mode) is derived per user. Everything
//! in this module is pure: identical inputs give identical outputs, and
//! nothing here touches the simulator state.

use crate::error::{Error, Result};
use crate::wat::{PerWat, UserId, Wat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One per-user, per-WAT measurement record at a telemetry epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub wat: Wat,
    pub cell_id: u32,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
    /// Buffer occupancy of the serving node, percent of capacity.
    pub buffer_pct: f64,
    /// Estimated transmission delay in milliseconds, reporting-capped.
    pub delay_ms: f64,
    pub timestamp_s: f64,
}

impl TelemetrySample {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.buffer_pct) {
            return Err(Error::invalid(format!(
                "buffer_pct {} outside [0, 100]",
                self.buffer_pct
            )));
        }
        if self.delay_ms.is_nan() || self.delay_ms < 0.0 {
            return Err(Error::invalid(format!(
                "delay_ms {} negative",
                self.delay_ms
            )));
        }
        if !self.sinr_db.is_finite() || !self.rsrp_dbm.is_finite() {
            return Err(Error::invalid("non-finite signal telemetry".to_string()));
        }
        Ok(())
    }
}

/// Operator weights for the three utility inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamWeights {
    pub sinr: f64,
    pub buffer: f64,
    pub delay: f64,
}

impl ParamWeights {
    /// Weights must be finite and strictly positive: a zero weight makes the
    /// utility denominator log(1) = 0. Operators that want to ignore a
    /// parameter set a small epsilon instead (1e-6 is small enough that the
    /// parameter contributes < 1e-4 to any utility in the default ranges).
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("sinr", self.sinr),
            ("buffer", self.buffer),
            ("delay", self.delay),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!(
                    "weight {name} = {w} must be finite and non-negative"
                )));
            }
            if w == 0.0 {
                return Err(Error::invalid(format!(
                    "weight {name} = 0 is invalid (utility denominator becomes log(1) = 0); \
                     use a small epsilon such as 1e-6 to effectively ignore the parameter"
                )));
            }
        }
        Ok(())
    }
}

/// Per-WAT eligibility thresholds: SINR is a lower bound, buffer and delay
/// are upper bounds. Comparisons are strict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamThresholds {
    pub sinr_db: f64,
    pub buffer_pct: f64,
    pub delay_ms: f64,
}

impl ParamThresholds {
    /// `buffer_pct` may exceed 100: with strict comparisons a threshold above
    /// 100 means the buffer gate never excludes a WAT, which is a meaningful
    /// operator choice (telemetry itself is capped at 100 %).
    pub fn validate(&self) -> Result<()> {
        if !self.sinr_db.is_finite() {
            return Err(Error::invalid("t_sinr must be finite".to_string()));
        }
        if !self.buffer_pct.is_finite() || self.buffer_pct < 0.0 {
            return Err(Error::invalid(format!(
                "t_buffer {} must be finite and >= 0",
                self.buffer_pct
            )));
        }
        if !self.delay_ms.is_finite() || self.delay_ms <= 0.0 {
            return Err(Error::invalid(format!(
                "t_delay {} must be finite and > 0",
                self.delay_ms
            )));
        }
        Ok(())
    }
}

/// Normalization maxima: the telemetry value at which each parameter's
/// utility saturates at 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationMaxima {
    pub sinr_db: f64,
    pub buffer_pct: f64,
    pub delay_ms: f64,
}

impl NormalizationMaxima {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [
            ("x_max_sinr", self.sinr_db),
            ("x_max_buffer", self.buffer_pct),
            ("x_max_delay", self.delay_ms),
        ] {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} = {m} must be finite and > 0"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteeringMode {
    LoadBalancing,
    SplitDuplicate,
}

/// Operator configuration for one steering mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringPolicy {
    pub mode: SteeringMode,
    pub weights: ParamWeights,
    pub thresholds: PerWat<ParamThresholds>,
    pub maxima: NormalizationMaxima,
}

impl SteeringPolicy {
    pub fn new(
        mode: SteeringMode,
        weights: ParamWeights,
        thresholds: PerWat<ParamThresholds>,
        maxima: NormalizationMaxima,
    ) -> Self {
        Self {
            mode,
            weights,
            thresholds,
            maxima,
        }
    }

    /// Same thresholds on every WAT.
    pub fn uniform(
        mode: SteeringMode,
        weights: ParamWeights,
        thresholds: ParamThresholds,
        maxima: NormalizationMaxima,
    ) -> Self {
        Self::new(mode, weights, PerWat::splat(thresholds), maxima)
    }

    /// Expand a single normalized threshold `q` into raw per-parameter
    /// thresholds: SINR lower bound `q * x_max_sinr`, buffer and delay upper
    /// bounds `q * x_max` each.
    pub fn from_normalized_threshold(
        mode: SteeringMode,
        weights: ParamWeights,
        q: f64,
        maxima: NormalizationMaxima,
    ) -> Result<Self> {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!(
                "normalized threshold {q} outside [0, 1]"
            )));
        }
        let thresholds = ParamThresholds {
            sinr_db: q * maxima.sinr_db,
            buffer_pct: q * maxima.buffer_pct,
            delay_ms: q * maxima.delay_ms,
        };
        Ok(Self::uniform(mode, weights, thresholds, maxima))
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        for (_, th) in self.thresholds.iter() {
            th.validate()?;
        }
        self.maxima.validate()
    }
}

/// Per-parameter utilities, their composition, and the eligibility verdict
/// for one WAT.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UtilityBreakdown {
    pub u_sinr: f64,
    pub u_buffer: f64,
    pub u_delay: f64,
    /// `u_sinr - u_buffer - u_delay` when eligible, 0 otherwise.
    pub overall: f64,
    pub eligible: bool,
}

/// The steering output for one user at one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringDecision {
    pub user_id: UserId,
    pub mode: SteeringMode,
    /// Percentage weights per WAT; present exactly in load-balancing mode.
    pub lb_weights: Option<PerWat<f64>>,
    /// Duplication set per WAT; present exactly in split/duplicate mode.
    pub sd_selection: Option<PerWat<bool>>,
    pub breakdowns: PerWat<UtilityBreakdown>,
    /// Load-balancing epochs where no WAT has positive clamped utility emit
    /// all-zero weights and set this flag.
    pub degenerate: bool,
}

/// Logarithmic utility of a single telemetry value.
///
/// For `0 < x < x_max` this is `log(1 + w*x) / log(1 + w*x_max)`; values at
/// or below 0 score 0, values at or above `x_max` score 1.
pub fn param_utility(x: f64, w: f64, x_max: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("telemetry value {x} is not finite")));
    }
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::invalid(format!(
            "weight {w} must be finite and > 0 (zero makes the denominator log(1) = 0)"
        )));
    }
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(Error::invalid(format!(
            "x_max {x_max} must be finite and > 0"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= x_max {
        return Ok(1.0);
    }
    Ok((w * x).ln_1p() / (w * x_max).ln_1p())
}

/// Map raw telemetry into the utility input domain: SINR and buffer pass
/// through unchanged (negative SINR is handled by the x <= 0 clamp of the
/// utility itself), delay is capped at its normalization maximum.
pub fn normalize_sample(s: &TelemetrySample, maxima: &NormalizationMaxima) -> (f64, f64, f64) {
    (s.sinr_db, s.buffer_pct, s.delay_ms.min(maxima.delay_ms))
}

/// Strict eligibility gate: SINR above its lower bound, buffer and delay
/// below their upper bounds.
pub fn eligibility(s: &TelemetrySample, th: &ParamThresholds) -> bool {
    s.sinr_db > th.sinr_db && s.buffer_pct < th.buffer_pct && s.delay_ms < th.delay_ms
}

/// Score one WAT's telemetry under a policy.
pub fn utility_breakdown(s: &TelemetrySample, policy: &SteeringPolicy) -> Result<UtilityBreakdown> {
    let th = policy.thresholds.get(s.wat);
    if !eligibility(s, th) {
        return Ok(UtilityBreakdown::default());
    }
    let (x_sinr, x_buffer, x_delay) = normalize_sample(s, &policy.maxima);
    let w = &policy.weights;
    let m = &policy.maxima;
    let u_sinr = param_utility(x_sinr, w.sinr, m.sinr_db)?;
    let u_buffer = param_utility(x_buffer, w.buffer, m.buffer_pct)?;
    let u_delay = param_utility(x_delay, w.delay, m.delay_ms)?;
    Ok(UtilityBreakdown {
        u_sinr,
        u_buffer,
        u_delay,
        overall: u_sinr - u_buffer - u_delay,
        eligible: true,
    })
}

/// Load-balancing weight assignment: each overall utility is clamped at 0,
/// then normalized to percentages. Returns the weights and whether the
/// decision is degenerate (no WAT had positive clamped utility).
pub fn lb_weights(breakdowns: &PerWat<UtilityBreakdown>) -> (PerWat<f64>, bool) {
    let clamped = breakdowns.map(|_, b| b.overall.max(0.0));
    let total = clamped.five_g + clamped.wifi + clamped.lifi;
    if total <= 0.0 {
        return (PerWat::splat(0.0), true);
    }
    (clamped.map(|_, u| u / total * 100.0), false)
}

/// Split/duplicate selection: a WAT carries a copy exactly when its overall
/// utility is positive. Zero, one, two, or all three WATs may be selected.
pub fn sd_selection(breakdowns: &PerWat<UtilityBreakdown>) -> PerWat<bool> {
    breakdowns.map(|_, b| b.overall > 0.0)
}

/// Decide for one user from one telemetry sample per WAT. A `None` sample
/// means the WAT has no coverage at the user's position and is treated as
/// ineligible.
pub fn decide_user(
    samples: &PerWat<Option<TelemetrySample>>,
    policy: &SteeringPolicy,
    user_id: UserId,
) -> Result<SteeringDecision> {
    // All present samples must agree on the WAT slot and the epoch.
    let mut stamp: Option<f64> = None;
    for (wat, slot) in samples.iter() {
        if let Some(s) = slot {
            if s.wat != wat {
                return Err(Error::invalid(format!(
                    "sample in {} slot reports wat {}",
                    wat.label(),
                    s.wat.label()
                )));
            }
            match stamp {
                None => stamp = Some(s.timestamp_s),
                Some(t) if t == s.timestamp_s => {}
                Some(t) => {
                    return Err(Error::invalid(format!(
                        "telemetry timestamps differ within one decision: {t} vs {}",
                        s.timestamp_s
                    )))
                }
            }
        }
    }

    let mut breakdowns = PerWat::<UtilityBreakdown>::default();
    for wat in Wat::ALL {
        if let Some(s) = samples.get(wat) {
            *breakdowns.get_mut(wat) = utility_breakdown(s, policy)?;
        }
    }

    let decision = match policy.mode {
        SteeringMode::LoadBalancing => {
            let (weights, degenerate) = lb_weights(&breakdowns);
            SteeringDecision {
                user_id,
                mode: policy.mode,
                lb_weights: Some(weights),
                sd_selection: None,
                breakdowns,
                degenerate,
            }
        }
        SteeringMode::SplitDuplicate => SteeringDecision {
            user_id,
            mode: policy.mode,
            lb_weights: None,
            sd_selection: Some(sd_selection(&breakdowns)),
            breakdowns,
            degenerate: false,
        },
    };
    Ok(decision)
}

/// Decide for every active user. Users are independent within an epoch, so
/// the output order simply follows the input order.
pub fn decide_all(
    active_users: &[UserId],
    telemetry: &BTreeMap<UserId, PerWat<Option<TelemetrySample>>>,
    policies: &BTreeMap<UserId, SteeringPolicy>,
) -> Result<Vec<SteeringDecision>> {
    let mut decisions = Vec::with_capacity(active_users.len());
    for &user in active_users {
        let samples = telemetry
            .get(&user)
            .ok_or(Error::MissingTelemetry { user })?;
        let policy = policies.get(&user).ok_or(Error::MissingPolicy { user })?;
        decisions.push(decide_user(samples, policy, user)?);
    }
    Ok(decisions)
}

/// Round percentage weights to integers that sum to exactly 100 using
/// largest-remainder correction. Used for display; internal weights keep
/// full precision. Degenerate all-zero weights stay all zero.
pub fn rounded_weights(weights: &PerWat<f64>) -> PerWat<u32> {
    let total: f64 = Wat::ALL.iter().map(|&w| *weights.get(w)).sum();
    if total <= 0.0 {
        return PerWat::splat(0);
    }
    let mut floors = [0u32; 3];
    let mut remainders = [(0usize, 0.0f64); 3];
    let mut assigned = 0u32;
    for (i, &w) in Wat::ALL.iter().enumerate() {
        let v = *weights.get(w);
        let fl = v.floor();
        floors[i] = fl as u32;
        assigned += floors[i];
        remainders[i] = (i, v - fl);
    }
    // Hand out the leftover points to the largest remainders; ties go to
    // the earlier WAT so the result is deterministic.
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut leftover = 100u32.saturating_sub(assigned);
    for (idx, _) in remainders {
        if leftover == 0 {
            break;
        }
        floors[idx] += 1;
        leftover -= 1;
    }
    PerWat::new(floors[0], floors[1], floors[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(wat: Wat, sinr: f64, buffer: f64, delay: f64) -> TelemetrySample {
        TelemetrySample {
            wat,
            cell_id: 1,
            rsrp_dbm: -80.0,
            sinr_db: sinr,
            buffer_pct: buffer,
            delay_ms: delay,
            timestamp_s: 0.0,
        }
    }

    fn lb_policy() -> SteeringPolicy {
        SteeringPolicy::uniform(
            SteeringMode::LoadBalancing,
            ParamWeights {
                sinr: 1.0,
                buffer: 0.7,
                delay: 0.2,
            },
            ParamThresholds {
                sinr_db: 0.0,
                buffer_pct: 60.0,
                delay_ms: 60.0,
            },
            NormalizationMaxima {
                sinr_db: 40.0,
                buffer_pct: 100.0,
                delay_ms: 100.0,
            },
        )
    }

    #[test]
    fn param_utility_boundaries() {
        assert_eq!(param_utility(0.0, 1.0, 40.0).unwrap(), 0.0);
        assert_eq!(param_utility(-5.0, 1.0, 40.0).unwrap(), 0.0);
        assert_eq!(param_utility(40.0, 1.0, 40.0).unwrap(), 1.0);
        assert_eq!(param_utility(55.0, 1.0, 40.0).unwrap(), 1.0);
    }

    #[test]
    fn param_utility_interior_value() {
        // log(11)/log(41), checked against a 50-digit evaluation.
        let u = param_utility(10.0, 1.0, 40.0).unwrap();
        assert!((u - 0.645_711_253_134_892_3).abs() < 1e-15, "u = {u}");
    }

    #[test]
    fn param_utility_rejects_bad_inputs() {
        assert!(param_utility(f64::NAN, 1.0, 40.0).is_err());
        assert!(param_utility(1.0, 0.0, 40.0).is_err());
        assert!(param_utility(1.0, 1.0, 0.0).is_err());
        assert!(param_utility(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn normalize_passes_through_and_caps_delay() {
        let maxima = NormalizationMaxima {
            sinr_db: 40.0,
            buffer_pct: 100.0,
            delay_ms: 100.0,
        };
        let s = sample(Wat::FiveG, -5.0, 27.0, 140.0);
        let (x_sinr, x_buffer, x_delay) = normalize_sample(&s, &maxima);
        assert_eq!(x_sinr, -5.0);
        assert_eq!(x_buffer, 27.0);
        assert_eq!(x_delay, 100.0);
    }

    #[test]
    fn eligibility_is_strict() {
        let th = ParamThresholds {
            sinr_db: 0.0,
            buffer_pct: 60.0,
            delay_ms: 60.0,
        };
        assert!(eligibility(&sample(Wat::FiveG, 29.0, 8.0, 14.0), &th));
        // Strict at the delay boundary.
        assert!(!eligibility(&sample(Wat::FiveG, 29.0, 8.0, 60.0), &th));
        // SINR below the lower bound.
        assert!(!eligibility(&sample(Wat::FiveG, -10.0, 0.0, 0.0), &th));
        // SINR exactly at the bound fails the strict comparison.
        assert!(!eligibility(&sample(Wat::FiveG, 0.0, 0.0, 0.0), &th));
    }

    #[test]
    fn breakdown_ineligible_is_all_zero() {
        let policy = lb_policy();
        let s = sample(Wat::FiveG, -1.0, 8.0, 14.0);
        let b = utility_breakdown(&s, &policy).unwrap();
        assert_eq!(b, UtilityBreakdown::default());
        assert!(!b.eligible);
    }

    #[test]
    fn breakdown_saturated_sinr_gives_overall_one() {
        let policy = lb_policy();
        let s = sample(Wat::FiveG, 40.0, 0.0, 0.0);
        let b = utility_breakdown(&s, &policy).unwrap();
        assert_eq!(b.overall, 1.0);
        assert!(b.eligible);
    }

    #[test]
    fn breakdown_matches_high_precision_evaluation() {
        // sinr 29 dB, buffer 8 %, delay 14 ms under weights (1, 0.7, 0.2)
        // and maxima (40, 100, 100); components from a 50-digit oracle.
        let policy = lb_policy();
        let b = utility_breakdown(&sample(Wat::FiveG, 29.0, 8.0, 14.0), &policy).unwrap();
        assert!((b.u_sinr - 0.915_882_961_356_025).abs() < 1e-15);
        assert!((b.u_buffer - 0.442_695_605_456_109_6).abs() < 1e-15);
        assert!((b.u_delay - 0.438_492_766_612_882_2).abs() < 1e-15);
        assert!((b.overall - 0.034_694_589_287_033_2).abs() < 1e-14);
    }

    #[test]
    fn lb_weights_symmetric_split() {
        let mk = |overall: f64| UtilityBreakdown {
            overall,
            eligible: overall != 0.0,
            ..Default::default()
        };
        let (w, degenerate) = lb_weights(&PerWat::new(mk(0.5), mk(0.0), mk(0.5)));
        assert!(!degenerate);
        assert_eq!(w.five_g, 50.0);
        assert_eq!(w.wifi, 0.0);
        assert_eq!(w.lifi, 50.0);
    }

    #[test]
    fn lb_weights_single_positive_takes_all() {
        let mk = |overall: f64| UtilityBreakdown {
            overall,
            eligible: true,
            ..Default::default()
        };
        let (w, degenerate) = lb_weights(&PerWat::new(mk(0.3), mk(0.0), mk(0.0)));
        assert!(!degenerate);
        assert_eq!(w.five_g, 100.0);
        assert_eq!(w.wifi, 0.0);
        assert_eq!(w.lifi, 0.0);
    }

    #[test]
    fn lb_weights_negative_clamped_and_degenerate_flagged() {
        let mk = |overall: f64| UtilityBreakdown {
            overall,
            eligible: true,
            ..Default::default()
        };
        let (w, degenerate) = lb_weights(&PerWat::new(mk(-0.5), mk(-0.1), mk(0.0)));
        assert!(degenerate);
        assert_eq!((w.five_g, w.wifi, w.lifi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sd_selection_is_a_sign_test() {
        let mk = |overall: f64| UtilityBreakdown {
            overall,
            eligible: true,
            ..Default::default()
        };
        let sel = sd_selection(&PerWat::new(mk(0.2), mk(0.1), mk(0.05)));
        assert_eq!((sel.five_g, sel.wifi, sel.lifi), (true, true, true));
        let sel = sd_selection(&PerWat::new(mk(-0.1), mk(0.3), mk(0.0)));
        assert_eq!((sel.five_g, sel.wifi, sel.lifi), (false, true, false));
    }

    #[test]
    fn decide_user_all_ineligible_lb_is_degenerate() {
        let policy = lb_policy();
        let samples = PerWat::from_fn(|w| Some(sample(w, -5.0, 90.0, 90.0)));
        let d = decide_user(&samples, &policy, UserId(1)).unwrap();
        assert!(d.degenerate);
        let w = d.lb_weights.unwrap();
        assert_eq!((w.five_g, w.wifi, w.lifi), (0.0, 0.0, 0.0));
        assert!(d.sd_selection.is_none());
    }

    #[test]
    fn decide_user_rejects_mixed_timestamps() {
        let policy = lb_policy();
        let mut samples = PerWat::from_fn(|w| Some(sample(w, 10.0, 10.0, 10.0)));
        samples.lifi.as_mut().unwrap().timestamp_s = 1.0;
        assert!(decide_user(&samples, &policy, UserId(1)).is_err());
    }

    #[test]
    fn decide_user_treats_missing_coverage_as_ineligible() {
        let policy = lb_policy();
        let mut samples = PerWat::from_fn(|w| Some(sample(w, 10.0, 10.0, 10.0)));
        samples.lifi = None;
        let d = decide_user(&samples, &policy, UserId(1)).unwrap();
        assert!(!d.breakdowns.lifi.eligible);
        assert_eq!(d.lb_weights.unwrap().lifi, 0.0);
    }

    #[test]
    fn decide_all_empty_and_missing_telemetry() {
        let telemetry = BTreeMap::new();
        let policies = BTreeMap::new();
        assert!(decide_all(&[], &telemetry, &policies).unwrap().is_empty());
        let err = decide_all(&[UserId(7)], &telemetry, &policies).unwrap_err();
        assert!(err.to_string().contains('7'));
    }

    #[test]
    fn decide_all_is_order_independent() {
        let policy = lb_policy();
        let mut telemetry = BTreeMap::new();
        let mut policies = BTreeMap::new();
        for id in [1u32, 2, 3] {
            let s = PerWat::from_fn(|w| Some(sample(w, 5.0 + id as f64, 10.0, 10.0)));
            telemetry.insert(UserId(id), s);
            policies.insert(UserId(id), policy);
        }
        let fwd = decide_all(&[UserId(1), UserId(2), UserId(3)], &telemetry, &policies).unwrap();
        let mut rev =
            decide_all(&[UserId(3), UserId(2), UserId(1)], &telemetry, &policies).unwrap();
        rev.reverse();
        assert_eq!(fwd, rev);
        // A singleton equals the per-user decision directly.
        let single = decide_all(&[UserId(2)], &telemetry, &policies).unwrap();
        let direct = decide_user(&telemetry[&UserId(2)], &policy, UserId(2)).unwrap();
        assert_eq!(single, vec![direct]);
    }

    #[test]
    fn rounded_weights_sum_to_exactly_100() {
        let w = PerWat::new(33.333_333, 33.333_333, 33.333_334);
        let r = rounded_weights(&w);
        assert_eq!(r.five_g + r.wifi + r.lifi, 100);
        let w = PerWat::new(49.3, 21.9, 28.8);
        let r = rounded_weights(&w);
        assert_eq!(r.five_g + r.wifi + r.lifi, 100);
        assert_eq!((r.five_g, r.wifi, r.lifi), (49, 22, 29));
    }

    #[test]
    fn zero_weight_policy_is_rejected() {
        let mut p = lb_policy();
        p.weights.delay = 0.0;
        assert!(p.validate().is_err());
        p.weights.delay = 1e-6;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn normalized_threshold_expansion() {
        let p = SteeringPolicy::from_normalized_threshold(
            SteeringMode::LoadBalancing,
            ParamWeights {
                sinr: 1.0,
                buffer: 0.7,
                delay: 0.2,
            },
            0.6,
            NormalizationMaxima {
                sinr_db: 40.0,
                buffer_pct: 100.0,
                delay_ms: 100.0,
            },
        )
        .unwrap();
        let th = p.thresholds.get(Wat::FiveG);
        assert_eq!(th.sinr_db, 24.0);
        assert_eq!(th.buffer_pct, 60.0);
        assert_eq!(th.delay_ms, 60.0);
        assert!(SteeringPolicy::from_normalized_threshold(
            SteeringMode::LoadBalancing,
            ParamWeights {
                sinr: 1.0,
                buffer: 0.7,
                delay: 0.2
            },
            1.5,
            NormalizationMaxima {
                sinr_db: 40.0,
                buffer_pct: 100.0,
                delay_ms: 100.0
            },
        )
        .is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Monotone non-decreasing in x, output always in [0, 1].
            #[test]
            fn utility_monotone_and_bounded(
                x1 in -50.0..500.0f64,
                x2 in -50.0..500.0f64,
                w in 1e-3..10.0f64,
                x_max in 0.1..400.0f64,
            ) {
                let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
                let u_lo = param_utility(lo, w, x_max).unwrap();
                let u_hi = param_utility(hi, w, x_max).unwrap();
                prop_assert!(u_lo <= u_hi);
                prop_assert!((0.0..=1.0).contains(&u_lo));
                prop_assert!((0.0..=1.0).contains(&u_hi));
            }

            // Weights are non-negative and sum to 100 whenever any clamped
            // utility is positive; scaling all utilities by a common factor
            // leaves the weights unchanged.
            #[test]
            fn lb_weights_normalized_and_scale_invariant(
                u1 in -1.0..1.0f64,
                u2 in -1.0..1.0f64,
                u3 in -1.0..1.0f64,
                scale in 0.01..100.0f64,
            ) {
                let mk = |overall: f64| UtilityBreakdown { overall, eligible: true, ..Default::default() };
                let b = PerWat::new(mk(u1), mk(u2), mk(u3));
                let (w, degenerate) = lb_weights(&b);
                let sum = w.five_g + w.wifi + w.lifi;
                if degenerate {
                    prop_assert_eq!(sum, 0.0);
                } else {
                    prop_assert!((sum - 100.0).abs() < 0.5);
                    prop_assert!(w.five_g >= 0.0 && w.wifi >= 0.0 && w.lifi >= 0.0);
                    let scaled = PerWat::new(mk(u1 * scale), mk(u2 * scale), mk(u3 * scale));
                    let (ws, _) = lb_weights(&scaled);
                    for wat in Wat::ALL {
                        prop_assert!((ws.get(wat) - w.get(wat)).abs() < 1e-6);
                    }
                }
            }

            // Raising the buffer bound never shrinks the eligible set.
            #[test]
            fn eligibility_monotone_in_buffer_threshold(
                sinr in -10.0..40.0f64,
                buffer in 0.0..100.0f64,
                delay in 0.0..100.0f64,
                t_buffer_lo in 0.0..100.0f64,
                bump in 0.0..50.0f64,
            ) {
                let s = TelemetrySample {
                    wat: Wat::FiveG, cell_id: 0, rsrp_dbm: -90.0,
                    sinr_db: sinr, buffer_pct: buffer, delay_ms: delay, timestamp_s: 0.0,
                };
                let lo = ParamThresholds { sinr_db: 0.0, buffer_pct: t_buffer_lo, delay_ms: 60.0 };
                let hi = ParamThresholds { buffer_pct: t_buffer_lo + bump, ..lo };
                if eligibility(&s, &lo) {
                    prop_assert!(eligibility(&s, &hi));
                }
            }

            // SD selection is exactly the sign test, and an ineligible WAT
            // is never selected and never weighted.
            #[test]
            fn ineligible_gets_nothing(sinr in -30.0..40.0f64, buffer in 0.0..100.0f64, delay in 0.0..100.0f64) {
                let policy = SteeringPolicy::uniform(
                    SteeringMode::LoadBalancing,
                    ParamWeights { sinr: 1.0, buffer: 0.7, delay: 0.2 },
                    ParamThresholds { sinr_db: 5.0, buffer_pct: 50.0, delay_ms: 50.0 },
                    NormalizationMaxima { sinr_db: 40.0, buffer_pct: 100.0, delay_ms: 100.0 },
                );
                let s = TelemetrySample {
                    wat: Wat::WiFi, cell_id: 0, rsrp_dbm: -90.0,
                    sinr_db: sinr, buffer_pct: buffer, delay_ms: delay, timestamp_s: 0.0,
                };
                let b = utility_breakdown(&s, &policy).unwrap();
                let eligible = sinr > 5.0 && buffer < 50.0 && delay < 50.0;
                prop_assert_eq!(b.eligible, eligible);
                if !eligible {
                    prop_assert_eq!(b.overall, 0.0);
                }
            }
        }
    }
}
