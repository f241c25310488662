//! Configuration files.
//!
//! Runs are configured with a TOML file. The full schema is documented in
//! the README; the important conventions:
//!
//! - `[layout]` either names `preset = "default-factory"` or spells out the
//!   whole geometry inline (bounds, nodes, static users, AGV path).
//!   `n_static_users` places that many users uniformly at random in the
//!   hall, deterministically from the master seed.
//! - `[policy.embb]` / `[policy.urllc]` configure the two steering modes.
//!   Thresholds come either from `normalized_threshold = q` (expanded
//!   against the maxima) or from an explicit `thresholds` table, uniform or
//!   per WAT.
//! - The resolved configuration is hashed (SHA-256 over its canonical TOML
//!   serialization); the hash is printed by `run` and recorded in the
//!   summary so a trace can always be tied back to its exact inputs.

use crate::engine::{AgvParams, LibraryParams, PoliciesByType, QueueParams, SimConfig};
use crate::error::{Error, Result};
use crate::radio::{
    default_factory_layout, default_noise, AccessNode, NoiseParams, PathEnd, ScenarioLayout, Vec3,
};
use crate::seed::stream_rng;
use crate::steering::{
    NormalizationMaxima, ParamThresholds, ParamWeights, SteeringMode, SteeringPolicy,
};
use crate::traffic::TrafficType;
use crate::wat::{PerWat, UserId};
use rand::Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: u64,
    pub duration_s: f64,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_epoch")]
    pub decision_epoch_s: f64,
    #[serde(default = "default_delay_cap")]
    pub delay_cap_ms: f64,
    pub layout: LayoutSection,
    #[serde(default)]
    pub traffic: TrafficSection,
    #[serde(default)]
    pub agv: AgvSection,
    #[serde(default)]
    pub queueing: QueueSection,
    #[serde(default)]
    pub radio: RadioSection,
    pub policy: PolicySection,
}

fn default_dt() -> f64 {
    0.1
}
fn default_epoch() -> f64 {
    1.0
}
fn default_delay_cap() -> f64 {
    100.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    /// `"default-factory"` or absent when the layout is inline.
    pub preset: Option<String>,
    /// Place this many static users uniformly in the bounds (ids 1..=n).
    #[serde(default)]
    pub n_static_users: Option<u32>,
    pub agv_path_end: Option<PathEnd>,
    pub agv_speed_mps: Option<f64>,
    pub bounds_min: Option<[f64; 3]>,
    pub bounds_max: Option<[f64; 3]>,
    pub agv_path: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub nodes: Vec<AccessNode>,
    #[serde(default)]
    pub static_users: Vec<StaticUser>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct StaticUser {
    pub id: u32,
    pub position: [f64; 3],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSection {
    #[serde(default = "default_lambda")]
    pub lambda_per_s: f64,
    #[serde(default = "default_n_files")]
    pub n_files: usize,
    #[serde(default = "default_alpha")]
    pub zipf_alpha: f64,
    #[serde(default = "default_size_min")]
    pub size_min_bytes: u64,
    #[serde(default = "default_size_max")]
    pub size_max_bytes: u64,
}

fn default_lambda() -> f64 {
    2.0
}
fn default_n_files() -> usize {
    1000
}
fn default_alpha() -> f64 {
    0.8
}
fn default_size_min() -> u64 {
    500_000
}
fn default_size_max() -> u64 {
    20_000_000
}

impl Default for TrafficSection {
    fn default() -> Self {
        Self {
            lambda_per_s: default_lambda(),
            n_files: default_n_files(),
            zipf_alpha: default_alpha(),
            size_min_bytes: default_size_min(),
            size_max_bytes: default_size_max(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgvSection {
    #[serde(default = "default_agv_id")]
    pub user_id: u32,
    #[serde(default = "default_traffic_type")]
    pub traffic_type: TrafficType,
    #[serde(default = "default_demand")]
    pub demand_mbps: f64,
}

fn default_agv_id() -> u32 {
    0
}
fn default_traffic_type() -> TrafficType {
    TrafficType::Embb
}
fn default_demand() -> f64 {
    20.0
}

impl Default for AgvSection {
    fn default() -> Self {
        Self {
            user_id: default_agv_id(),
            traffic_type: default_traffic_type(),
            demand_mbps: default_demand(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSection {
    #[serde(default = "default_capacity")]
    pub capacity_bytes: CapacitySpec,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    #[serde(default = "default_max_rate")]
    pub max_rate_mbps: PerWat<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CapacitySpec {
    Uniform(u64),
    PerWat(PerWat<u64>),
}

impl CapacitySpec {
    fn resolve(&self) -> PerWat<u64> {
        match self {
            CapacitySpec::Uniform(c) => PerWat::splat(*c),
            CapacitySpec::PerWat(p) => *p,
        }
    }
}

fn default_capacity() -> CapacitySpec {
    CapacitySpec::Uniform(50_000_000)
}
fn default_efficiency() -> f64 {
    0.6
}
fn default_max_rate() -> PerWat<f64> {
    PerWat::new(1000.0, 600.0, 300.0)
}

impl Default for QueueSection {
    fn default() -> Self {
        Self {
            capacity_bytes: default_capacity(),
            efficiency: default_efficiency(),
            max_rate_mbps: default_max_rate(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub noise_floor_dbm: Option<PerWat<f64>>,
    #[serde(default)]
    pub shadowing_sigma_db: f64,
    #[serde(default)]
    pub handover_hysteresis_db: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub embb: PolicyFile,
    pub urllc: PolicyFile,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub mode: SteeringMode,
    pub weights: ParamWeights,
    pub maxima: NormalizationMaxima,
    pub normalized_threshold: Option<f64>,
    pub thresholds: Option<ThresholdSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Uniform(ParamThresholds),
    PerWat(PerWat<ParamThresholds>),
}

impl PolicyFile {
    fn resolve(&self, name: &str) -> Result<SteeringPolicy> {
        match (&self.thresholds, self.normalized_threshold) {
            (Some(_), Some(_)) => Err(Error::invalid(format!(
                "policy {name}: set either thresholds or normalized_threshold, not both"
            ))),
            (None, None) => Err(Error::invalid(format!(
                "policy {name}: one of thresholds or normalized_threshold is required"
            ))),
            (Some(ThresholdSpec::Uniform(t)), None) => Ok(SteeringPolicy::uniform(
                self.mode,
                self.weights,
                *t,
                self.maxima,
            )),
            (Some(ThresholdSpec::PerWat(t)), None) => Ok(SteeringPolicy::new(
                self.mode,
                self.weights,
                *t,
                self.maxima,
            )),
            (None, Some(q)) => {
                SteeringPolicy::from_normalized_threshold(self.mode, self.weights, q, self.maxima)
            }
        }
    }
}

/// Parse a config file without resolving it. I/O and TOML errors are
/// config-class errors with the path in the message.
pub fn parse_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::InvalidConfig {
        path: path.display().to_string(),
        report: e.to_string(),
    })
}

fn resolve_layout(section: &LayoutSection, seed: u64) -> Result<ScenarioLayout> {
    let mut layout = match section.preset.as_deref() {
        Some("default-factory") => default_factory_layout(),
        Some(other) => {
            return Err(Error::invalid(format!(
                "unknown layout preset {other:?} (available: default-factory)"
            )))
        }
        None => {
            let need =
                |field: &str| Error::invalid(format!("inline layout requires layout.{field}"));
            ScenarioLayout {
                bounds_min: section
                    .bounds_min
                    .map(v3)
                    .ok_or_else(|| need("bounds_min"))?,
                bounds_max: section
                    .bounds_max
                    .map(v3)
                    .ok_or_else(|| need("bounds_max"))?,
                nodes: section.nodes.clone(),
                static_users: Vec::new(),
                agv_path: section
                    .agv_path
                    .as_ref()
                    .ok_or_else(|| need("agv_path"))?
                    .iter()
                    .copied()
                    .map(v3)
                    .collect(),
                agv_speed_mps: section.agv_speed_mps.ok_or_else(|| need("agv_speed_mps"))?,
                path_end: section.agv_path_end.unwrap_or_default(),
            }
        }
    };
    // Preset overrides.
    if section.preset.is_some() {
        if let Some(speed) = section.agv_speed_mps {
            layout.agv_speed_mps = speed;
        }
        if let Some(end) = section.agv_path_end {
            layout.path_end = end;
        }
        if !section.nodes.is_empty() {
            return Err(Error::invalid(
                "layout.nodes cannot be combined with a preset; use an inline layout",
            ));
        }
    }
    layout.static_users = section
        .static_users
        .iter()
        .map(|u| (UserId(u.id), v3(u.position)))
        .collect();
    if let Some(n) = section.n_static_users {
        if !layout.static_users.is_empty() {
            return Err(Error::invalid(
                "set either layout.n_static_users or explicit layout.static_users, not both",
            ));
        }
        let mut rng = stream_rng(seed, "user-positions", 0);
        for i in 1..=n {
            let x = rng.gen_range(layout.bounds_min.x..layout.bounds_max.x);
            let y = rng.gen_range(layout.bounds_min.y..layout.bounds_max.y);
            layout.static_users.push((UserId(i), Vec3::new(x, y, 1.5)));
        }
    }
    Ok(layout)
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl ConfigFile {
    /// Resolve into a runnable configuration. `seed_override` wins over the
    /// file's seed (and over seed-derived user placement).
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<SimConfig> {
        let seed = seed_override.unwrap_or(self.seed);
        let layout = resolve_layout(&self.layout, seed)?;
        let noise = match &self.radio.noise_floor_dbm {
            Some(floors) => NoiseParams { floor_dbm: *floors },
            None => default_noise(),
        };
        let cfg = SimConfig {
            layout,
            noise,
            lambda_per_s: self.traffic.lambda_per_s,
            library: LibraryParams {
                n_files: self.traffic.n_files,
                zipf_alpha: self.traffic.zipf_alpha,
                size_min_bytes: self.traffic.size_min_bytes,
                size_max_bytes: self.traffic.size_max_bytes,
            },
            policies: PoliciesByType {
                embb: self.policy.embb.resolve("embb")?,
                urllc: self.policy.urllc.resolve("urllc")?,
            },
            agv: AgvParams {
                user_id: UserId(self.agv.user_id),
                traffic_type: self.agv.traffic_type,
                demand_mbps: self.agv.demand_mbps,
            },
            queueing: QueueParams {
                capacity_bytes: self.queueing.capacity_bytes.resolve(),
                efficiency: self.queueing.efficiency,
                max_rate_bps: self.queueing.max_rate_mbps.map(|_, &m| m * 1e6),
            },
            dt_s: self.dt_s,
            decision_epoch_s: self.decision_epoch_s,
            duration_s: self.duration_s,
            seed,
            delay_cap_ms: self.delay_cap_ms,
            shadowing_sigma_db: self.radio.shadowing_sigma_db,
            handover_hysteresis_db: self.radio.handover_hysteresis_db,
        };
        Ok(cfg)
    }
}

/// Load and resolve a config file, without running validation.
pub fn load(path: &Path, seed_override: Option<u64>) -> Result<SimConfig> {
    parse_file(path)?.resolve(seed_override)
}

/// Load, resolve, and validate; the error lists every violation.
pub fn load_validated(path: &Path, seed_override: Option<u64>) -> Result<SimConfig> {
    let cfg = load(path, seed_override)?;
    let report = cfg.validation_report();
    if report.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::InvalidConfig {
            path: path.display().to_string(),
            report: report.join("\n"),
        })
    }
}

/// SHA-256 over the canonical TOML serialization of the resolved config.
pub fn config_hash(cfg: &SimConfig) -> String {
    let canonical = toml::to_string(cfg).expect("resolved config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialize the resolved config back to TOML (written next to each run's
/// trace for reproducibility).
pub fn render_resolved(cfg: &SimConfig) -> String {
    toml::to_string(cfg).expect("resolved config serializes")
}

/// The built-in scenario with the standard eMBB/URLLC policy pair, used by
/// unit tests and examples.
pub fn default_sim_config(seed: u64) -> SimConfig {
    let maxima = NormalizationMaxima {
        sinr_db: 40.0,
        buffer_pct: 100.0,
        delay_ms: 100.0,
    };
    let embb = SteeringPolicy::from_normalized_threshold(
        SteeringMode::LoadBalancing,
        ParamWeights {
            sinr: 1.0,
            buffer: 0.7,
            delay: 0.2,
        },
        0.6,
        maxima,
    )
    .expect("valid default policy");
    let urllc = SteeringPolicy::from_normalized_threshold(
        SteeringMode::SplitDuplicate,
        ParamWeights {
            sinr: 0.5,
            buffer: 0.2,
            delay: 1.0,
        },
        0.6,
        maxima,
    )
    .expect("valid default policy");

    let mut layout = default_factory_layout();
    layout.path_end = PathEnd::Loop;
    let mut rng = stream_rng(seed, "user-positions", 0);
    for i in 1..=100u32 {
        let x = rng.gen_range(layout.bounds_min.x..layout.bounds_max.x);
        let y = rng.gen_range(layout.bounds_min.y..layout.bounds_max.y);
        layout.static_users.push((UserId(i), Vec3::new(x, y, 1.5)));
    }

    SimConfig {
        layout,
        noise: default_noise(),
        lambda_per_s: 2.0,
        library: LibraryParams {
            n_files: 1000,
            zipf_alpha: 0.8,
            size_min_bytes: 500_000,
            size_max_bytes: 20_000_000,
        },
        policies: PoliciesByType { embb, urllc },
        agv: AgvParams {
            user_id: UserId(0),
            traffic_type: TrafficType::Embb,
            demand_mbps: 20.0,
        },
        queueing: QueueParams {
            capacity_bytes: PerWat::splat(50_000_000),
            efficiency: 0.6,
            max_rate_bps: PerWat::new(1000e6, 600e6, 300e6),
        },
        dt_s: 0.1,
        decision_epoch_s: 1.0,
        duration_s: 600.0,
        seed,
        delay_cap_ms: 100.0,
        shadowing_sigma_db: 0.0,
        handover_hysteresis_db: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wat::Wat;

    fn minimal_toml() -> String {
        r#"
seed = 42
duration_s = 10.0

[layout]
preset = "default-factory"
n_static_users = 3

[policy.embb]
mode = "load-balancing"
weights = { sinr = 1.0, buffer = 0.7, delay = 0.2 }
maxima = { sinr_db = 40.0, buffer_pct = 100.0, delay_ms = 100.0 }
normalized_threshold = 0.6

[policy.urllc]
mode = "split-duplicate"
weights = { sinr = 0.5, buffer = 0.2, delay = 1.0 }
maxima = { sinr_db = 40.0, buffer_pct = 100.0, delay_ms = 100.0 }
normalized_threshold = 0.6
"#
        .to_string()
    }

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let file: ConfigFile = toml::from_str(&minimal_toml()).unwrap();
        let cfg = file.resolve(None).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.dt_s, 0.1);
        assert_eq!(cfg.layout.static_users.len(), 3);
        assert_eq!(cfg.lambda_per_s, 2.0);
        assert!(
            cfg.validation_report().is_empty(),
            "{:?}",
            cfg.validation_report()
        );
        // Normalized threshold expanded against the maxima.
        let th = cfg.policies.embb.thresholds.get(Wat::FiveG);
        assert_eq!(th.sinr_db, 24.0);
    }

    #[test]
    fn seed_override_wins_and_changes_hash() {
        let file: ConfigFile = toml::from_str(&minimal_toml()).unwrap();
        let a = file.resolve(None).unwrap();
        let b = file.resolve(Some(7)).unwrap();
        assert_eq!(b.seed, 7);
        assert_ne!(config_hash(&a), config_hash(&b));
        let c = file.resolve(None).unwrap();
        assert_eq!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn both_threshold_forms_rejected_together() {
        let mut text = minimal_toml();
        text = text.replace(
            "normalized_threshold = 0.6\n\n[policy.urllc]",
            "normalized_threshold = 0.6\nthresholds = { sinr_db = 0.0, buffer_pct = 60.0, delay_ms = 60.0 }\n\n[policy.urllc]",
        );
        let file: ConfigFile = toml::from_str(&text).unwrap();
        assert!(file.resolve(None).is_err());
    }

    #[test]
    fn per_wat_thresholds_parse() {
        let text = minimal_toml().replace(
            "normalized_threshold = 0.6\n\n[policy.urllc]",
            r#"
[policy.embb.thresholds]
"5g" = { sinr_db = 0.0, buffer_pct = 60.0, delay_ms = 60.0 }
wifi = { sinr_db = 1.0, buffer_pct = 61.0, delay_ms = 61.0 }
lifi = { sinr_db = 2.0, buffer_pct = 62.0, delay_ms = 62.0 }

[policy.urllc]
"#,
        );
        let file: ConfigFile = toml::from_str(&text).unwrap();
        let cfg = file.resolve(None).unwrap();
        assert_eq!(cfg.policies.embb.thresholds.get(Wat::WiFi).sinr_db, 1.0);
    }

    #[test]
    fn inline_layout_round_trips() {
        let text = r#"
seed = 1
duration_s = 5.0

[layout]
bounds_min = [0.0, 0.0, 0.0]
bounds_max = [20.0, 20.0, 5.0]
agv_speed_mps = 0.7
agv_path = [[1.0, 1.0, 1.0], [19.0, 1.0, 1.0]]

[[layout.nodes]]
node_id = 1
wat = "5g"
position_m = { x = 10.0, y = 10.0, z = 4.0 }
tx_power_dbm = 30.0
carrier_hz = 3.5e9
bandwidth_hz = 80e6
channel = 0
pathloss = { model = "log-distance", pl0_db = 87.0, exponent = 4.2, d0_m = 1.0 }

[[layout.nodes]]
node_id = 2
wat = "wifi"
position_m = { x = 5.0, y = 10.0, z = 4.0 }
tx_power_dbm = 20.0
carrier_hz = 5e9
bandwidth_hz = 80e6
channel = 0
pathloss = { model = "log-distance", pl0_db = 79.4, exponent = 2.7, d0_m = 1.0 }

[[layout.nodes]]
node_id = 3
wat = "lifi"
position_m = { x = 10.0, y = 1.0, z = 3.0 }
tx_power_dbm = -44.0
carrier_hz = 337e12
bandwidth_hz = 20e6
channel = 0
pathloss = { model = "lambertian", semi_angle_deg = 30.0, rx_area_m2 = 1e-4, fov_deg = 35.0 }

[[layout.static_users]]
id = 1
position = [3.0, 3.0, 1.5]

[policy.embb]
mode = "load-balancing"
weights = { sinr = 1.0, buffer = 0.7, delay = 0.2 }
maxima = { sinr_db = 40.0, buffer_pct = 100.0, delay_ms = 100.0 }
normalized_threshold = 0.5

[policy.urllc]
mode = "split-duplicate"
weights = { sinr = 0.5, buffer = 0.2, delay = 1.0 }
maxima = { sinr_db = 40.0, buffer_pct = 100.0, delay_ms = 100.0 }
normalized_threshold = 0.5
"#;
        let file: ConfigFile = toml::from_str(text).unwrap();
        let cfg = file.resolve(None).unwrap();
        assert_eq!(cfg.layout.nodes.len(), 3);
        assert_eq!(cfg.layout.static_users.len(), 1);
        assert!(
            cfg.validation_report().is_empty(),
            "{:?}",
            cfg.validation_report()
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = minimal_toml() + "\nnonsense_key = 3\n";
        assert!(toml::from_str::<ConfigFile>(&text).is_err());
    }

    #[test]
    fn default_sim_config_is_valid() {
        let cfg = default_sim_config(42);
        assert!(
            cfg.validation_report().is_empty(),
            "{:?}",
            cfg.validation_report()
        );
        assert_eq!(cfg.layout.static_users.len(), 100);
    }
}
