//! The simulation loop.
//!
//! Time advances in fixed `dt` steps. Queues drain every step and request
//! arrivals are injected as they come due; every decision epoch (a fixed
//! multiple of `dt`) the engine re-associates all users, synthesizes
//! telemetry, runs the steering decision for every active user, and
//! re-distributes in-flight traffic according to the new decisions. A run
//! is a pure function of its configuration: identical config and seed give
//! a bit-identical trace.

use crate::error::{Error, Result};
use crate::metrics::round_sig;
use crate::queueing::{serve_rate_bps, user_delay_ms, NodeQueue};
use crate::radio::{
    agv_position, rx_power_dbm, LinkMeasurement, NoiseParams, ScenarioLayout, Vec3,
};
use crate::seed::{derive_seed, stream_rng};
use crate::steering::{self, SteeringDecision, SteeringMode, SteeringPolicy, TelemetrySample};
use crate::traffic::{
    generate_requests, ArrivalConfig, ContentLibrary, Request, RequestStream, TrafficType,
};
use crate::wat::{NodeId, PerWat, UserId, Wat};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LibraryParams {
    pub n_files: usize,
    pub zipf_alpha: f64,
    pub size_min_bytes: u64,
    pub size_max_bytes: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QueueParams {
    pub capacity_bytes: PerWat<u64>,
    pub efficiency: f64,
    pub max_rate_bps: PerWat<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AgvParams {
    pub user_id: UserId,
    pub traffic_type: TrafficType,
    /// Sustained downlink demand of the AGV's persistent session.
    pub demand_mbps: f64,
}

/// Steering policies keyed by requested traffic type: eMBB flows steer in
/// load-balancing mode, URLLC flows in split/duplicate mode.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PoliciesByType {
    pub embb: SteeringPolicy,
    pub urllc: SteeringPolicy,
}

impl PoliciesByType {
    pub fn for_type(&self, t: TrafficType) -> &SteeringPolicy {
        match t {
            TrafficType::Embb => &self.embb,
            TrafficType::Urllc => &self.urllc,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub layout: ScenarioLayout,
    pub noise: NoiseParams,
    pub lambda_per_s: f64,
    pub library: LibraryParams,
    pub policies: PoliciesByType,
    pub agv: AgvParams,
    pub queueing: QueueParams,
    pub dt_s: f64,
    pub decision_epoch_s: f64,
    pub duration_s: f64,
    pub seed: u64,
    pub delay_cap_ms: f64,
    pub shadowing_sigma_db: f64,
    /// Handover stickiness: a user re-associates away from its serving node
    /// only when a candidate beats it by more than this margin. 0 disables
    /// hysteresis and every epoch picks the strongest cell outright.
    pub handover_hysteresis_db: f64,
}

impl SimConfig {
    /// Collect every violation rather than stopping at the first.
    pub fn validation_report(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.dt_s <= 0.0 || !self.dt_s.is_finite() {
            problems.push(format!("dt_s {} must be > 0", self.dt_s));
        }
        if self.duration_s < 0.0 || !self.duration_s.is_finite() {
            problems.push(format!("duration_s {} must be >= 0", self.duration_s));
        }
        if self.dt_s > 0.0 {
            let ratio = self.decision_epoch_s / self.dt_s;
            if (ratio - ratio.round()).abs() > 1e-6 || ratio.round() < 1.0 {
                problems.push(format!(
                    "decision_epoch_s {} must be a positive integer multiple of dt_s {}",
                    self.decision_epoch_s, self.dt_s
                ));
            }
        }
        if self.delay_cap_ms <= 0.0 {
            problems.push(format!("delay_cap_ms {} must be > 0", self.delay_cap_ms));
        }
        if self.lambda_per_s <= 0.0 || !self.lambda_per_s.is_finite() {
            problems.push(format!("lambda_per_s {} must be > 0", self.lambda_per_s));
        }
        if self.library.n_files == 0 {
            problems.push("library needs at least one file".to_string());
        }
        if self.library.size_min_bytes == 0
            || self.library.size_min_bytes > self.library.size_max_bytes
        {
            problems.push(format!(
                "file size bounds [{}, {}] must satisfy 0 < min <= max",
                self.library.size_min_bytes, self.library.size_max_bytes
            ));
        }
        if self.library.zipf_alpha < 0.0 || !self.library.zipf_alpha.is_finite() {
            problems.push(format!(
                "zipf_alpha {} must be >= 0",
                self.library.zipf_alpha
            ));
        }
        if self.queueing.efficiency <= 0.0 || self.queueing.efficiency > 1.0 {
            problems.push(format!(
                "spectral efficiency {} must be in (0, 1]",
                self.queueing.efficiency
            ));
        }
        for (wat, &cap) in self.queueing.capacity_bytes.iter() {
            if cap == 0 {
                problems.push(format!("{wat} queue capacity must be > 0"));
            }
        }
        if self.agv.demand_mbps < 0.0 {
            problems.push(format!("agv demand {} must be >= 0", self.agv.demand_mbps));
        }
        if self
            .layout
            .static_users
            .iter()
            .any(|(id, _)| *id == self.agv.user_id)
        {
            problems.push(format!(
                "agv user id {} collides with a static user",
                self.agv.user_id
            ));
        }
        let mut user_ids: Vec<UserId> =
            self.layout.static_users.iter().map(|(id, _)| *id).collect();
        user_ids.sort();
        user_ids.dedup();
        if user_ids.len() != self.layout.static_users.len() {
            problems.push("duplicate static user ids".to_string());
        }
        if self.shadowing_sigma_db < 0.0 {
            problems.push(format!(
                "shadowing sigma {} must be >= 0",
                self.shadowing_sigma_db
            ));
        }
        if self.handover_hysteresis_db < 0.0 || !self.handover_hysteresis_db.is_finite() {
            problems.push(format!(
                "handover hysteresis {} must be >= 0",
                self.handover_hysteresis_db
            ));
        }
        for (name, policy) in [
            ("embb", &self.policies.embb),
            ("urllc", &self.policies.urllc),
        ] {
            if let Err(e) = policy.validate() {
                problems.push(format!("policy {name}: {e}"));
            }
        }
        problems.extend(self.layout.validation_report());
        problems
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.validation_report();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig {
                path: "<config>".to_string(),
                report: problems.join("\n"),
            })
        }
    }

    pub fn steps_per_epoch(&self) -> u64 {
        (self.decision_epoch_s / self.dt_s).round() as u64
    }
}

/// Everything captured at one decision epoch for one user.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UserEpoch {
    pub telemetry: PerWat<Option<TelemetrySample>>,
    pub decision: Option<SteeringDecision>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpochRecord {
    pub timestamp_s: f64,
    pub agv_position: Vec3,
    pub users: BTreeMap<UserId, UserEpoch>,
    pub node_buffer_pct: BTreeMap<NodeId, f64>,
}

/// Exact byte ledger and run-level counters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub n_epochs: usize,
    /// Bytes offered to node queues (split fractions and duplicate copies
    /// each count; re-offered bytes after drops count again).
    pub injected_bytes: u64,
    pub served_bytes: u64,
    /// Bytes dropped at full queues.
    pub dropped_bytes: u64,
    /// Residual duplicate bytes flushed when a split/duplicate flow
    /// completed on its fastest copy.
    pub flushed_bytes: u64,
    /// Bytes still queued at the end of the run.
    pub residual_bytes: u64,
    pub requests_arrived: usize,
    pub flows_completed: usize,
    /// Seconds from request arrival to completion, one entry per flow.
    pub completion_times_s: Vec<f64>,
    pub agv_served_bytes: u64,
    pub degenerate_epoch_decisions: usize,
    /// (node, dropped bytes) pairs, ascending node id.
    pub dropped_by_node: Vec<(NodeId, u64)>,
}

impl RunStats {
    /// `injected = served + dropped + flushed + residual`, exactly.
    pub fn conservation_holds(&self) -> bool {
        self.injected_bytes
            == self.served_bytes + self.dropped_bytes + self.flushed_bytes + self.residual_bytes
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimTrace {
    pub records: Vec<EpochRecord>,
    pub stats: RunStats,
    pub library: ContentLibrary,
}

struct ActiveFlow {
    size_bytes: u64,
    served: PerWat<u64>,
    traffic_type: TrafficType,
    arrived_s: f64,
}

impl ActiveFlow {
    fn served_total(&self) -> u64 {
        self.served.five_g + self.served.wifi + self.served.lifi
    }

    fn complete(&self) -> bool {
        match self.traffic_type {
            // Load-balanced flows finish when all bytes are served across
            // WATs; duplicated flows finish when the fastest copy lands.
            TrafficType::Embb => self.served_total() >= self.size_bytes,
            TrafficType::Urllc => Wat::ALL
                .iter()
                .any(|&w| *self.served.get(w) >= self.size_bytes),
        }
    }
}

struct UserState {
    position: Vec3,
    is_agv: bool,
    flow: Option<ActiveFlow>,
    pending: VecDeque<Request>,
    links: PerWat<Option<LinkMeasurement>>,
    decision: Option<SteeringDecision>,
}

impl UserState {
    fn active(&self) -> bool {
        self.is_agv || self.flow.is_some() || !self.pending.is_empty()
    }
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    users: BTreeMap<UserId, UserState>,
    queues: BTreeMap<NodeId, NodeQueue>,
    node_wat: BTreeMap<NodeId, Wat>,
    rates: BTreeMap<(NodeId, UserId), f64>,
    shadow: BTreeMap<(NodeId, UserId), f64>,
    stats: RunStats,
    drops_by_node: BTreeMap<NodeId, u64>,
    telemetry: BTreeMap<UserId, PerWat<Option<TelemetrySample>>>,
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a SimConfig) -> Self {
        let mut users = BTreeMap::new();
        for (id, pos) in &cfg.layout.static_users {
            users.insert(
                *id,
                UserState {
                    position: *pos,
                    is_agv: false,
                    flow: None,
                    pending: VecDeque::new(),
                    links: PerWat::splat(None),
                    decision: None,
                },
            );
        }
        users.insert(
            cfg.agv.user_id,
            UserState {
                position: cfg.layout.agv_path[0],
                is_agv: true,
                flow: None,
                pending: VecDeque::new(),
                links: PerWat::splat(None),
                decision: None,
            },
        );

        let mut queues = BTreeMap::new();
        let mut node_wat = BTreeMap::new();
        for node in &cfg.layout.nodes {
            queues.insert(
                node.node_id,
                NodeQueue::new(node.node_id, *cfg.queueing.capacity_bytes.get(node.wat)),
            );
            node_wat.insert(node.node_id, node.wat);
        }

        let mut shadow = BTreeMap::new();
        if cfg.shadowing_sigma_db > 0.0 {
            // One static log-normal draw per (node, user) link.
            let user_ids: Vec<UserId> = users.keys().copied().collect();
            for node in &cfg.layout.nodes {
                for &user in &user_ids {
                    let mut rng = stream_rng(
                        cfg.seed,
                        "shadowing",
                        (node.node_id.0 as u64) << 32 | user.0 as u64,
                    );
                    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                    let u2: f64 = rng.gen();
                    let gauss = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                    shadow.insert((node.node_id, user), gauss * cfg.shadowing_sigma_db);
                }
            }
        }

        Sim {
            cfg,
            users,
            queues,
            node_wat,
            rates: BTreeMap::new(),
            shadow,
            stats: RunStats {
                seed: cfg.seed,
                ..RunStats::default()
            },
            drops_by_node: BTreeMap::new(),
            telemetry: BTreeMap::new(),
        }
    }

    fn shadow_db(&self, node: NodeId, user: UserId) -> f64 {
        self.shadow.get(&(node, user)).copied().unwrap_or(0.0)
    }

    fn rx_dbm(&self, node: &crate::radio::AccessNode, user: UserId, pos: &Vec3) -> Result<f64> {
        Ok(rx_power_dbm(node, pos)? - self.shadow_db(node.node_id, user))
    }

    /// Strongest-cell association with optional shadowing applied per link
    /// and optional handover hysteresis against the previous serving node.
    fn link_for(
        &self,
        user: UserId,
        pos: &Vec3,
        wat: Wat,
        prev: Option<NodeId>,
    ) -> Result<Option<LinkMeasurement>> {
        let mut best: Option<(f64, &crate::radio::AccessNode)> = None;
        for node in self.cfg.layout.nodes_of(wat) {
            let rx = self.rx_dbm(node, user, pos)?;
            if rx == f64::NEG_INFINITY {
                continue;
            }
            best = match best {
                None => Some((rx, node)),
                Some((b_rx, b_node)) => {
                    if rx > b_rx || (rx == b_rx && node.node_id < b_node.node_id) {
                        Some((rx, node))
                    } else {
                        Some((b_rx, b_node))
                    }
                }
            };
        }
        let Some((mut rx, mut serving)) = best else {
            return Ok(None);
        };
        let margin = self.cfg.handover_hysteresis_db;
        if margin > 0.0 {
            if let Some(prev_id) = prev {
                if prev_id != serving.node_id {
                    if let Some(prev_node) =
                        self.cfg.layout.nodes_of(wat).find(|n| n.node_id == prev_id)
                    {
                        let prev_rx = self.rx_dbm(prev_node, user, pos)?;
                        // Stay on the old cell until the challenger clears
                        // the margin.
                        if prev_rx > f64::NEG_INFINITY && rx < prev_rx + margin {
                            serving = prev_node;
                            rx = prev_rx;
                        }
                    }
                }
            }
        }
        let mut interference_mw = 0.0;
        for node in self.cfg.layout.nodes_of(wat) {
            if node.node_id == serving.node_id || node.channel != serving.channel {
                continue;
            }
            let i = self.rx_dbm(node, user, pos)?;
            if i > f64::NEG_INFINITY {
                interference_mw += 10f64.powf(i / 10.0);
            }
        }
        let noise_mw = 10f64.powf(*self.cfg.noise.floor_dbm.get(wat) / 10.0);
        let sinr = 10.0 * (10f64.powf(rx / 10.0) / (interference_mw + noise_mw)).log10();
        Ok(Some(LinkMeasurement {
            node_id: serving.node_id,
            rsrp_dbm: rx,
            sinr_db: sinr,
        }))
    }

    fn link_rate(&self, node_id: NodeId, sinr_db: f64) -> f64 {
        let node = self
            .cfg
            .layout
            .node(node_id)
            .expect("queues only exist for layout nodes");
        serve_rate_bps(
            sinr_db,
            node.bandwidth_hz,
            self.cfg.queueing.efficiency,
            *self.cfg.queueing.max_rate_bps.get(node.wat),
        )
    }

    /// Bytes of `user` currently sitting in queues, per WAT.
    fn queued_for(&self, user: UserId) -> PerWat<u64> {
        let mut out = PerWat::splat(0u64);
        for (node_id, queue) in &self.queues {
            let q = queue.queued_for(user);
            if q > 0 {
                *out.get_mut(self.node_wat[node_id]) += q;
            }
        }
        out
    }

    fn enqueue(&mut self, node_id: NodeId, user: UserId, bytes: u64) {
        if bytes == 0 {
            return;
        }
        self.stats.injected_bytes += bytes;
        let queue = self.queues.get_mut(&node_id).expect("known node");
        let before_dropped = queue.dropped_bytes;
        queue.enqueue(user, bytes);
        let newly_dropped = queue.dropped_bytes - before_dropped;
        if newly_dropped > 0 {
            self.stats.dropped_bytes += newly_dropped;
            *self.drops_by_node.entry(node_id).or_insert(0) += newly_dropped;
        }
    }

    /// The WAT with the best current SINR among covered WATs, used when a
    /// decision leaves a flow with nowhere to go (degenerate load-balancing
    /// epochs and empty duplication sets).
    fn best_covered_wat(links: &PerWat<Option<LinkMeasurement>>) -> Option<Wat> {
        let mut best: Option<(f64, Wat)> = None;
        for wat in Wat::ALL {
            if let Some(m) = links.get(wat) {
                let better = match best {
                    None => true,
                    Some((s, _)) => m.sinr_db > s,
                };
                if better {
                    best = Some((m.sinr_db, wat));
                }
            }
        }
        best.map(|(_, w)| w)
    }

    /// Distribute `bytes` for `user` according to its current decision.
    fn route_bytes(&mut self, user: UserId, bytes: u64) {
        if bytes == 0 {
            return;
        }
        let (links, decision) = {
            let st = &self.users[&user];
            (st.links, st.decision.clone())
        };
        let Some(decision) = decision else {
            return;
        };
        match decision.mode {
            SteeringMode::LoadBalancing => {
                let weights = decision.lb_weights.expect("lb decision carries weights");
                if decision.degenerate {
                    if let Some(wat) = Self::best_covered_wat(&links) {
                        let node = links.get(wat).expect("covered").node_id;
                        self.enqueue(node, user, bytes);
                    }
                    return;
                }
                let shares = crate::queueing::split_by_weights(bytes, &weights);
                for wat in Wat::ALL {
                    let share = *shares.get(wat);
                    if share == 0 {
                        continue;
                    }
                    if let Some(m) = links.get(wat) {
                        self.enqueue(m.node_id, user, share);
                    }
                }
            }
            SteeringMode::SplitDuplicate => {
                let selection = decision
                    .sd_selection
                    .expect("sd decision carries selection");
                let any = Wat::ALL.iter().any(|&w| *selection.get(w));
                if !any {
                    if let Some(wat) = Self::best_covered_wat(&links) {
                        let node = links.get(wat).expect("covered").node_id;
                        self.enqueue(node, user, bytes);
                    }
                    return;
                }
                for wat in Wat::ALL {
                    if *selection.get(wat) {
                        if let Some(m) = links.get(wat) {
                            self.enqueue(m.node_id, user, bytes);
                        }
                    }
                }
            }
        }
    }

    /// Top up queues so the user's outstanding bytes sit where the current
    /// decision wants them. Bytes already queued stay where they are.
    fn sync_flow(&mut self, user: UserId) {
        let Some((size, served, served_total, traffic)) = self.users[&user]
            .flow
            .as_ref()
            .map(|f| (f.size_bytes, f.served, f.served_total(), f.traffic_type))
        else {
            return;
        };
        let queued = self.queued_for(user);
        match traffic {
            TrafficType::Embb => {
                let outstanding = size.saturating_sub(served_total);
                let queued_total = queued.five_g + queued.wifi + queued.lifi;
                let unqueued = outstanding.saturating_sub(queued_total);
                self.route_bytes(user, unqueued);
            }
            TrafficType::Urllc => {
                let (links, decision) = {
                    let st = &self.users[&user];
                    (st.links, st.decision.clone())
                };
                let Some(decision) = decision else { return };
                let selection = match decision.sd_selection {
                    Some(sel) if Wat::ALL.iter().any(|&w| *sel.get(w)) => sel,
                    // Empty or absent selection: duplicate set collapses to
                    // the best covered WAT.
                    _ => match Self::best_covered_wat(&links) {
                        Some(w) => PerWat::from_fn(|x| x == w),
                        None => return,
                    },
                };
                for wat in Wat::ALL {
                    if !*selection.get(wat) {
                        continue;
                    }
                    let need = size
                        .saturating_sub(*served.get(wat))
                        .saturating_sub(*queued.get(wat));
                    if need > 0 {
                        if let Some(m) = links.get(wat) {
                            self.enqueue(m.node_id, user, need);
                        }
                    }
                }
            }
        }
    }

    fn activate_next_flow(&mut self, user: UserId, now_s: f64) {
        loop {
            let Some(req) = self.users.get_mut(&user).unwrap().pending.pop_front() else {
                return;
            };
            let flow = ActiveFlow {
                size_bytes: req.size_bytes,
                served: PerWat::splat(0),
                traffic_type: req.traffic_type,
                arrived_s: req.arrival_time_s,
            };
            if flow.size_bytes == 0 {
                self.stats.flows_completed += 1;
                self.stats
                    .completion_times_s
                    .push(now_s - req.arrival_time_s);
                continue;
            }
            self.users.get_mut(&user).unwrap().flow = Some(flow);
            // Newly active mid-epoch: decide from the current epoch's
            // telemetry so routing never waits for the next boundary.
            if self.users[&user].decision.is_none() {
                if let Some(samples) = self.telemetry.get(&user) {
                    let policy = self.cfg.policies.for_type(req.traffic_type);
                    if let Ok(d) = steering::decide_user(samples, policy, user) {
                        self.users.get_mut(&user).unwrap().decision = Some(d);
                    }
                }
            }
            self.sync_flow(user);
            return;
        }
    }

    fn epoch_update(&mut self, t: f64) -> Result<EpochRecord> {
        // AGV moves; everyone else is static.
        let agv_pos = agv_position(
            t,
            &self.cfg.layout.agv_path,
            self.cfg.layout.agv_speed_mps,
            self.cfg.layout.path_end,
        )?;
        self.users
            .get_mut(&self.cfg.agv.user_id)
            .expect("agv user exists")
            .position = agv_pos;

        // Fresh associations and telemetry for every user, before any new
        // bytes land this epoch.
        let user_ids: Vec<UserId> = self.users.keys().copied().collect();
        let mut telemetry: BTreeMap<UserId, PerWat<Option<TelemetrySample>>> = BTreeMap::new();
        for &user in &user_ids {
            let pos = self.users[&user].position;
            let prev_links = self.users[&user].links;
            let mut links = PerWat::splat(None);
            let mut samples = PerWat::splat(None);
            for wat in Wat::ALL {
                let prev = prev_links.get(wat).map(|m| m.node_id);
                let link = self.link_for(user, &pos, wat, prev)?;
                if let Some(m) = link {
                    let rate = self.link_rate(m.node_id, m.sinr_db);
                    self.rates.insert((m.node_id, user), rate);
                    let queue = &self.queues[&m.node_id];
                    let sample = TelemetrySample {
                        wat,
                        cell_id: m.node_id.0,
                        rsrp_dbm: round_sig(m.rsrp_dbm),
                        sinr_db: round_sig(m.sinr_db),
                        buffer_pct: round_sig(queue.buffer_pct()),
                        delay_ms: round_sig(user_delay_ms(
                            queue,
                            user,
                            rate,
                            self.cfg.delay_cap_ms,
                        )),
                        timestamp_s: t,
                    };
                    *samples.get_mut(wat) = Some(sample);
                    *links.get_mut(wat) = Some(m);
                }
            }
            self.users.get_mut(&user).unwrap().links = links;
            telemetry.insert(user, samples);
        }
        self.telemetry = telemetry;

        // Refresh rates for every node still draining bytes, including
        // nodes the user is no longer associated with.
        let mut stale: Vec<(NodeId, UserId)> = Vec::new();
        for (node_id, queue) in &self.queues {
            for &user in &user_ids {
                if queue.queued_for(user) > 0 {
                    stale.push((*node_id, user));
                }
            }
        }
        for (node_id, user) in stale {
            let node = self.cfg.layout.node(node_id).expect("known node");
            let pos = self.users[&user].position;
            let rx = self.rx_dbm(node, user, &pos)?;
            let sinr = if rx == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                // Keep draining leftovers at the measured link quality.
                self.link_for(
                    user,
                    &pos,
                    node.wat,
                    self.users[&user].links.get(node.wat).map(|m| m.node_id),
                )?
                .map(|m| {
                    if m.node_id == node_id {
                        m.sinr_db
                    } else {
                        m.sinr_db - (m.rsrp_dbm - rx)
                    }
                })
                .unwrap_or(f64::NEG_INFINITY)
            };
            self.rates
                .insert((node_id, user), self.link_rate(node_id, sinr));
        }

        // Decide for every active user.
        let active: Vec<UserId> = user_ids
            .iter()
            .copied()
            .filter(|u| self.users[u].active())
            .collect();
        let mut policies = BTreeMap::new();
        for &user in &active {
            let traffic = if user == self.cfg.agv.user_id {
                self.cfg.agv.traffic_type
            } else {
                self.users[&user]
                    .flow
                    .as_ref()
                    .map(|f| f.traffic_type)
                    .unwrap_or(TrafficType::Embb)
            };
            policies.insert(user, *self.cfg.policies.for_type(traffic));
        }
        let decisions = steering::decide_all(&active, &self.telemetry, &policies)?;
        for d in &decisions {
            if d.degenerate {
                self.stats.degenerate_epoch_decisions += 1;
            }
        }

        // Record the epoch exactly as decided, then apply the decisions.
        let mut users_record: BTreeMap<UserId, UserEpoch> = BTreeMap::new();
        for &user in &user_ids {
            users_record.insert(
                user,
                UserEpoch {
                    telemetry: self.telemetry[&user],
                    decision: None,
                },
            );
        }
        for d in decisions {
            let user = d.user_id;
            users_record.get_mut(&user).unwrap().decision = Some(d.clone());
            self.users.get_mut(&user).unwrap().decision = Some(d);
        }
        let node_buffer_pct = self
            .queues
            .iter()
            .map(|(id, q)| (*id, round_sig(q.buffer_pct())))
            .collect();
        let record = EpochRecord {
            timestamp_s: t,
            agv_position: agv_pos,
            users: users_record,
            node_buffer_pct,
        };

        // The AGV's persistent session demands a fresh chunk every epoch.
        let agv_chunk = (self.cfg.agv.demand_mbps * 1e6 / 8.0 * self.cfg.decision_epoch_s) as u64;
        if agv_chunk > 0 {
            match self.cfg.agv.traffic_type {
                TrafficType::Embb => self.route_bytes(self.cfg.agv.user_id, agv_chunk),
                TrafficType::Urllc => {
                    // Duplicate the chunk like any split/duplicate flow.
                    let user = self.cfg.agv.user_id;
                    let (links, decision) = {
                        let st = &self.users[&user];
                        (st.links, st.decision.clone())
                    };
                    if let Some(d) = decision {
                        let sel = d.sd_selection.expect("sd decision");
                        let any = Wat::ALL.iter().any(|&w| *sel.get(w));
                        if any {
                            for wat in Wat::ALL {
                                if *sel.get(wat) {
                                    if let Some(m) = links.get(wat) {
                                        self.enqueue(m.node_id, user, agv_chunk);
                                    }
                                }
                            }
                        } else if let Some(wat) = Self::best_covered_wat(&links) {
                            let node = links.get(wat).expect("covered").node_id;
                            self.enqueue(node, user, agv_chunk);
                        }
                    }
                }
            }
        }

        // Re-split outstanding flow bytes under the new decisions.
        for &user in &active {
            if user != self.cfg.agv.user_id {
                self.sync_flow(user);
            }
        }

        Ok(record)
    }

    fn advance_queues(&mut self, dt: f64, now_s: f64) {
        let node_ids: Vec<NodeId> = self.queues.keys().copied().collect();
        let mut credited: Vec<(UserId, Wat, u64)> = Vec::new();
        for node_id in node_ids {
            let wat = self.node_wat[&node_id];
            let rates = &self.rates;
            let queue = self.queues.get_mut(&node_id).expect("known node");
            let served = queue.advance(dt, &|user| {
                rates.get(&(node_id, user)).copied().unwrap_or(0.0)
            });
            for (user, bytes) in served {
                credited.push((user, wat, bytes));
            }
        }
        let mut completed: Vec<UserId> = Vec::new();
        for (user, wat, bytes) in credited {
            self.stats.served_bytes += bytes;
            if user == self.cfg.agv.user_id {
                self.stats.agv_served_bytes += bytes;
                continue;
            }
            if let Some(flow) = self.users.get_mut(&user).and_then(|s| s.flow.as_mut()) {
                *flow.served.get_mut(wat) += bytes;
                if flow.complete() && !completed.contains(&user) {
                    completed.push(user);
                }
            }
        }
        for user in completed {
            let flow = self
                .users
                .get_mut(&user)
                .unwrap()
                .flow
                .take()
                .expect("flow");
            self.stats.flows_completed += 1;
            self.stats.completion_times_s.push(now_s - flow.arrived_s);
            // Flush residual duplicates (and any stale split bytes).
            let node_ids: Vec<NodeId> = self.queues.keys().copied().collect();
            for node_id in node_ids {
                let flushed = self.queues.get_mut(&node_id).unwrap().flush_user(user);
                self.stats.flushed_bytes += flushed;
            }
            self.activate_next_flow(user, now_s);
        }
    }

    fn inject(&mut self, req: &Request, now_s: f64) {
        self.stats.requests_arrived += 1;
        let user = req.user_id;
        // One flow per user; later requests queue behind the current one.
        self.users.get_mut(&user).unwrap().pending.push_back(*req);
        if self.users[&user].flow.is_none() {
            self.activate_next_flow(user, now_s);
        }
    }

    fn finish(mut self, records: Vec<EpochRecord>, library: ContentLibrary) -> SimTrace {
        self.stats.residual_bytes = self.queues.values().map(|q| q.total_queued()).sum();
        self.stats.n_epochs = records.len();
        self.stats.dropped_by_node = self.drops_by_node.into_iter().collect();
        SimTrace {
            records,
            stats: self.stats,
            library,
        }
    }
}

/// Run a simulation to completion. Deterministic: the trace is a pure
/// function of the configuration (including its seed).
pub fn run(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;

    let mut lib_rng = stream_rng(cfg.seed, "library", 0);
    let library = ContentLibrary::generate(
        cfg.library.n_files,
        cfg.library.zipf_alpha,
        cfg.library.size_min_bytes,
        cfg.library.size_max_bytes,
        &mut lib_rng,
    )?;

    let static_ids: Vec<UserId> = cfg.layout.static_users.iter().map(|(id, _)| *id).collect();
    let stream = if static_ids.is_empty() {
        RequestStream::default()
    } else {
        generate_requests(
            &ArrivalConfig {
                lambda_per_s: cfg.lambda_per_s,
                horizon_s: cfg.duration_s,
                seed: derive_seed(cfg.seed, "traffic", 0),
            },
            &library,
            &static_ids,
        )?
    };

    let mut sim = Sim::new(cfg);
    let steps_per_epoch = cfg.steps_per_epoch();
    let n_steps = (cfg.duration_s / cfg.dt_s + 1e-9).floor() as u64;
    let mut records = Vec::new();
    let mut next_request = 0usize;

    for step in 0..n_steps {
        let t = step as f64 * cfg.dt_s;
        if step % steps_per_epoch == 0 {
            records.push(sim.epoch_update(t)?);
        }
        let t_next = (step + 1) as f64 * cfg.dt_s;
        while next_request < stream.requests.len()
            && stream.requests[next_request].arrival_time_s < t_next
        {
            let req = stream.requests[next_request];
            sim.inject(&req, req.arrival_time_s);
            next_request += 1;
        }
        sim.advance_queues(cfg.dt_s, t_next);
    }

    let trace = sim.finish(records, library);
    if !trace.stats.conservation_holds() {
        return Err(Error::Invariant {
            epoch_s: cfg.duration_s,
            message: format!(
                "byte conservation broken: injected {} != served {} + dropped {} + flushed {} + residual {}",
                trace.stats.injected_bytes,
                trace.stats.served_bytes,
                trace.stats.dropped_bytes,
                trace.stats.flushed_bytes,
                trace.stats.residual_bytes
            ),
        });
    }
    Ok(trace)
}

/// One point of a parameter sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SweepSpec {
    /// Replace both policies' thresholds with this normalized threshold.
    NormalizedThreshold(f64),
    /// Replace the per-parameter weights of both policies.
    Weights {
        embb: crate::steering::ParamWeights,
        urllc: crate::steering::ParamWeights,
    },
}

impl SweepSpec {
    pub fn label(&self) -> String {
        match self {
            SweepSpec::NormalizedThreshold(q) => format!("thr-{q}"),
            SweepSpec::Weights { embb, urllc } => format!(
                "w-{}-{}-{}-sd-{}-{}-{}",
                embb.sinr, embb.buffer, embb.delay, urllc.sinr, urllc.buffer, urllc.delay
            ),
        }
    }

    pub fn apply(&self, base: &SimConfig) -> Result<SimConfig> {
        let mut cfg = base.clone();
        match self {
            SweepSpec::NormalizedThreshold(q) => {
                cfg.policies.embb = SteeringPolicy::from_normalized_threshold(
                    cfg.policies.embb.mode,
                    cfg.policies.embb.weights,
                    *q,
                    cfg.policies.embb.maxima,
                )?;
                cfg.policies.urllc = SteeringPolicy::from_normalized_threshold(
                    cfg.policies.urllc.mode,
                    cfg.policies.urllc.weights,
                    *q,
                    cfg.policies.urllc.maxima,
                )?;
            }
            SweepSpec::Weights { embb, urllc } => {
                cfg.policies.embb.weights = *embb;
                cfg.policies.urllc.weights = *urllc;
            }
        }
        Ok(cfg)
    }
}

/// Run one independent simulation per sweep point. Each point gets a seed
/// derived from the base seed and its grid index; per-point failures are
/// reported without aborting the remaining points.
pub fn sweep(base: &SimConfig, points: &[SweepSpec]) -> Vec<(SweepSpec, Result<SimTrace>)> {
    points
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let result = spec.apply(base).and_then(|mut cfg| {
                cfg.seed = derive_seed(base.seed, "sweep", i as u64);
                run(&cfg)
            });
            (spec.clone(), result)
        })
        .collect()
}
