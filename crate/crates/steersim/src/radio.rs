//! Geometry, propagation, association, and AGV motion.
//!
//! 5G and Wi-Fi links use a log-distance pathloss model; LiFi uses a
//! Lambertian line-of-sight optical channel with a hard field-of-view
//! cutoff, expressed as an equivalent dB loss so the rest of the stack can
//! treat all three technologies uniformly.

use crate::error::{Error, Result};
use crate::wat::{NodeId, PerWat, UserId, Wat};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Propagation model parameters, selected per node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum PathLossParams {
    /// `PL(d) = pl0_db + 10 * exponent * log10(d / d0_m)`.
    LogDistance {
        pl0_db: f64,
        exponent: f64,
        d0_m: f64,
    },
    /// Downward-facing Lambertian LED with an upward-facing receiver.
    /// Outside the receiver field of view the loss is infinite.
    Lambertian {
        semi_angle_deg: f64,
        rx_area_m2: f64,
        fov_deg: f64,
    },
}

/// One access node (gNB, Wi-Fi AP, or LiFi AP).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessNode {
    pub node_id: NodeId,
    pub wat: Wat,
    pub position_m: Vec3,
    pub tx_power_dbm: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Co-channel group: nodes of the same WAT interfere only when they
    /// share a channel index. Default plan puts every node on channel 0.
    pub channel: u16,
    pub pathloss: PathLossParams,
}

/// Receiver-side noise floor per WAT, dBm over the node bandwidth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub floor_dbm: PerWat<f64>,
}

impl NoiseParams {
    /// Thermal noise over `bandwidth` plus a noise figure.
    pub fn thermal(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
        -174.0 + 10.0 * bandwidth_hz.log10() + noise_figure_db
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkMeasurement {
    pub node_id: NodeId,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
}

/// End-of-path behavior for the AGV.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathEnd {
    #[default]
    Stop,
    Loop,
}

/// Factory geometry: bounds, nodes, static users, and the AGV path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioLayout {
    pub bounds_min: Vec3,
    pub bounds_max: Vec3,
    pub nodes: Vec<AccessNode>,
    pub static_users: Vec<(UserId, Vec3)>,
    pub agv_path: Vec<Vec3>,
    pub agv_speed_mps: f64,
    pub path_end: PathEnd,
}

impl ScenarioLayout {
    /// Collect every violation rather than stopping at the first.
    pub fn validation_report(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.agv_speed_mps <= 0.0 || !self.agv_speed_mps.is_finite() {
            problems.push(format!("agv speed {} must be > 0", self.agv_speed_mps));
        }
        if self.agv_path.len() < 2 {
            problems.push("agv path needs at least 2 waypoints".to_string());
        }
        let inside = |p: &Vec3| {
            p.x >= self.bounds_min.x
                && p.x <= self.bounds_max.x
                && p.y >= self.bounds_min.y
                && p.y <= self.bounds_max.y
        };
        for node in &self.nodes {
            if node.bandwidth_hz <= 0.0 {
                problems.push(format!("node {} bandwidth must be > 0", node.node_id));
            }
            if !inside(&node.position_m) {
                problems.push(format!("node {} outside factory bounds", node.node_id));
            }
        }
        for (id, pos) in &self.static_users {
            if !inside(pos) {
                problems.push(format!("user {id} outside factory bounds"));
            }
        }
        for (i, p) in self.agv_path.iter().enumerate() {
            if !inside(p) {
                problems.push(format!("agv waypoint {i} outside factory bounds"));
            }
        }
        for wat in Wat::ALL {
            if !self.nodes.iter().any(|n| n.wat == wat) {
                problems.push(format!("no {wat} node in layout"));
            }
        }
        // Duplicate node ids break association tie-breaking.
        let mut ids: Vec<NodeId> = self.nodes.iter().map(|n| n.node_id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.nodes.len() {
            problems.push("duplicate node ids".to_string());
        }
        problems
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.validation_report();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(problems.join("; ")))
        }
    }

    pub fn nodes_of(&self, wat: Wat) -> impl Iterator<Item = &AccessNode> {
        self.nodes.iter().filter(move |n| n.wat == wat)
    }

    pub fn node(&self, id: NodeId) -> Option<&AccessNode> {
        self.nodes.iter().find(|n| n.node_id == id)
    }

    pub fn agv_path_length_m(&self) -> f64 {
        self.agv_path.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

/// Pathloss in dB from `node` to a receiver at `rx`. Returns `+inf` when the
/// receiver is outside a LiFi node's field of view (no link). Zero distance
/// is rejected.
pub fn pathloss_db(node: &AccessNode, rx: &Vec3) -> Result<f64> {
    let d = node.position_m.distance(rx);
    if d <= 0.0 {
        return Err(Error::invalid(format!(
            "zero distance between node {} and receiver",
            node.node_id
        )));
    }
    match node.pathloss {
        PathLossParams::LogDistance {
            pl0_db,
            exponent,
            d0_m,
        } => Ok(pl0_db + 10.0 * exponent * (d / d0_m).log10()),
        PathLossParams::Lambertian {
            semi_angle_deg,
            rx_area_m2,
            fov_deg,
        } => {
            // Emitter faces straight down, receiver faces straight up, so
            // the irradiance angle equals the incidence angle.
            let drop = node.position_m.z - rx.z;
            if drop <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let cos_psi = drop / d;
            let fov_cos = fov_deg.to_radians().cos();
            if cos_psi < fov_cos {
                return Ok(f64::INFINITY);
            }
            let m = -std::f64::consts::LN_2 / semi_angle_deg.to_radians().cos().ln();
            let gain = (m + 1.0) * rx_area_m2 / (2.0 * std::f64::consts::PI * d * d)
                * cos_psi.powf(m)
                * cos_psi;
            if gain <= 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(-10.0 * gain.log10())
        }
    }
}

/// Received power in dBm; `-inf` means no link.
pub fn rx_power_dbm(node: &AccessNode, rx: &Vec3) -> Result<f64> {
    Ok(node.tx_power_dbm - pathloss_db(node, rx)?)
}

fn dbm_to_mw(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(dbm / 10.0)
    }
}

/// SINR at `user_pos` when served by `serving`, with co-channel nodes of the
/// same WAT as interferers. LiFi interference falls out naturally: nodes
/// whose optical footprint does not reach the receiver contribute nothing.
pub fn sinr_db(
    user_pos: &Vec3,
    serving: &AccessNode,
    all_nodes: &[AccessNode],
    noise: &NoiseParams,
) -> Result<f64> {
    let signal_mw = dbm_to_mw(rx_power_dbm(serving, user_pos)?);
    let mut interference_mw = 0.0;
    for node in all_nodes {
        if node.node_id == serving.node_id
            || node.wat != serving.wat
            || node.channel != serving.channel
        {
            continue;
        }
        interference_mw += dbm_to_mw(rx_power_dbm(node, user_pos)?);
    }
    let noise_mw = dbm_to_mw(*noise.floor_dbm.get(serving.wat));
    if signal_mw == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (signal_mw / (interference_mw + noise_mw)).log10())
}

/// Strongest-cell association for one WAT: the node with maximum received
/// power, ties broken by lowest node id. `None` when no node of the WAT
/// reaches the user.
pub fn associate(
    user_pos: &Vec3,
    wat: Wat,
    layout: &ScenarioLayout,
    noise: &NoiseParams,
) -> Result<Option<LinkMeasurement>> {
    let mut best: Option<(f64, &AccessNode)> = None;
    for node in layout.nodes_of(wat) {
        let rx = rx_power_dbm(node, user_pos)?;
        if rx == f64::NEG_INFINITY {
            continue;
        }
        best = match best {
            None => Some((rx, node)),
            Some((best_rx, best_node)) => {
                if rx > best_rx || (rx == best_rx && node.node_id < best_node.node_id) {
                    Some((rx, node))
                } else {
                    Some((best_rx, best_node))
                }
            }
        };
    }
    match best {
        None => Ok(None),
        Some((rx, node)) => Ok(Some(LinkMeasurement {
            node_id: node.node_id,
            rsrp_dbm: rx,
            sinr_db: sinr_db(user_pos, node, &layout.nodes, noise)?,
        })),
    }
}

/// Arc-length position along the waypoint polyline after travelling
/// `speed * t` meters. Past the end the AGV either stops at the last
/// waypoint or wraps around, per `path_end`.
pub fn agv_position(t_s: f64, path: &[Vec3], speed_mps: f64, path_end: PathEnd) -> Result<Vec3> {
    if path.is_empty() {
        return Err(Error::invalid("agv path is empty"));
    }
    if path.len() == 1 {
        return Ok(path[0]);
    }
    let total: f64 = path.windows(2).map(|w| w[0].distance(&w[1])).sum();
    let mut travelled = speed_mps * t_s.max(0.0);
    match path_end {
        PathEnd::Stop => {
            if travelled >= total {
                return Ok(*path.last().expect("non-empty path"));
            }
        }
        PathEnd::Loop => {
            if total > 0.0 {
                travelled %= total;
            }
        }
    }
    for w in path.windows(2) {
        let seg = w[0].distance(&w[1]);
        if travelled <= seg && seg > 0.0 {
            let f = travelled / seg;
            return Ok(Vec3::new(
                w[0].x + (w[1].x - w[0].x) * f,
                w[0].y + (w[1].y - w[0].y) * f,
                w[0].z + (w[1].z - w[0].z) * f,
            ));
        }
        travelled -= seg;
    }
    Ok(*path.last().expect("non-empty path"))
}

/// Default factory layout: a 60 m x 30 m hall, six gNBs on a 2x3 grid,
/// five Wi-Fi APs, and a LiFi chain at 3 m spacing above the AGV loop.
/// Propagation parameters are calibrated so the AGV sees received power
/// roughly in the -77..-102 dBm band, 5G SINR swinging through 0 dB in
/// cell-edge stretches and peaking near 28 dB under a gNB, and LiFi cells
/// a few meters wide with small coverage gaps between them.
pub fn default_factory_layout() -> ScenarioLayout {
    let mut nodes = Vec::new();
    let mut next_id = 0u32;

    // Steep in-clutter decay keeps neighbor cells quiet enough for high
    // under-cell SINR while the serving-cell power stays in band.
    let fiveg_pl = PathLossParams::LogDistance {
        pl0_db: 87.0,
        exponent: 4.2,
        d0_m: 1.0,
    };
    for y in [6.0, 24.0] {
        for x in [12.0, 30.0, 48.0] {
            next_id += 1;
            nodes.push(AccessNode {
                node_id: NodeId(next_id),
                wat: Wat::FiveG,
                position_m: Vec3::new(x, y, 4.0),
                tx_power_dbm: 30.0,
                carrier_hz: 3.5e9,
                bandwidth_hz: 80e6,
                channel: 0,
                pathloss: fiveg_pl,
            });
        }
    }

    let wifi_pl = PathLossParams::LogDistance {
        pl0_db: 79.4,
        exponent: 2.7,
        d0_m: 1.0,
    };
    for (x, y) in [
        (10.0, 6.0),
        (50.0, 6.0),
        (30.0, 15.0),
        (10.0, 24.0),
        (50.0, 24.0),
    ] {
        next_id += 1;
        nodes.push(AccessNode {
            node_id: NodeId(next_id),
            wat: Wat::WiFi,
            position_m: Vec3::new(x, y, 6.0),
            tx_power_dbm: 20.0,
            carrier_hz: 5.0e9,
            bandwidth_hz: 80e6,
            channel: 0,
            pathloss: wifi_pl,
        });
    }

    // AGV loop under both gNB rows, crossing the hall at the short ends.
    let agv_path = vec![
        Vec3::new(5.0, 6.0, 1.0),
        Vec3::new(55.0, 6.0, 1.0),
        Vec3::new(55.0, 24.0, 1.0),
        Vec3::new(5.0, 24.0, 1.0),
        Vec3::new(5.0, 6.0, 1.0),
    ];

    // LiFi APs every 3 m along the path, mounted at 3 m directly above it.
    let lifi_pl = PathLossParams::Lambertian {
        semi_angle_deg: 30.0,
        rx_area_m2: 1e-4,
        fov_deg: 35.0,
    };
    let spacing = 3.0;
    let mut dist_into_path = 0.0;
    let total: f64 = agv_path.windows(2).map(|w| w[0].distance(&w[1])).sum();
    while dist_into_path < total {
        let p =
            agv_position(dist_into_path, &agv_path, 1.0, PathEnd::Stop).expect("path is non-empty");
        next_id += 1;
        nodes.push(AccessNode {
            node_id: NodeId(next_id),
            wat: Wat::LiFi,
            position_m: Vec3::new(p.x, p.y, 3.0),
            tx_power_dbm: -44.0,
            carrier_hz: 337e12,
            bandwidth_hz: 20e6,
            channel: 0,
            pathloss: lifi_pl,
        });
        dist_into_path += spacing;
    }

    ScenarioLayout {
        bounds_min: Vec3::new(0.0, 0.0, 0.0),
        bounds_max: Vec3::new(60.0, 30.0, 10.0),
        nodes,
        static_users: Vec::new(),
        agv_path,
        agv_speed_mps: 0.7,
        path_end: PathEnd::Stop,
    }
}

/// Default per-WAT noise floors for the factory layout, dBm over the node
/// bandwidth after receiver processing gain. The LiFi figure is an
/// equivalent optical receiver floor.
pub fn default_noise() -> NoiseParams {
    NoiseParams {
        floor_dbm: PerWat::new(-112.0, -105.0, -115.0),
    }
}
