//! Per-node downlink queues and service dynamics.
//!
//! Byte accounting is exact: every byte offered to a queue is either
//! accepted, or dropped and counted, and every accepted byte is eventually
//! served or remains queued. The conservation audit in the engine relies on
//! this being integer arithmetic throughout.

use crate::wat::{NodeId, UserId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Downlink queue of one access node.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeQueue {
    pub node_id: NodeId,
    pub capacity_bytes: u64,
    queued: BTreeMap<UserId, u64>,
    total_queued: u64,
    pub dropped_bytes: u64,
    pub served_bytes: u64,
}

impl NodeQueue {
    pub fn new(node_id: NodeId, capacity_bytes: u64) -> Self {
        Self {
            node_id,
            capacity_bytes,
            queued: BTreeMap::new(),
            total_queued: 0,
            dropped_bytes: 0,
            served_bytes: 0,
        }
    }

    pub fn total_queued(&self) -> u64 {
        self.total_queued
    }

    pub fn queued_for(&self, user: UserId) -> u64 {
        self.queued.get(&user).copied().unwrap_or(0)
    }

    pub fn buffer_pct(&self) -> f64 {
        100.0 * self.total_queued as f64 / self.capacity_bytes as f64
    }

    pub fn backlogged_users(&self) -> usize {
        self.queued.len()
    }

    /// Offer `bytes` for `user`; anything beyond the remaining capacity is
    /// dropped and counted. Returns the number of bytes accepted.
    pub fn enqueue(&mut self, user: UserId, bytes: u64) -> u64 {
        let room = self.capacity_bytes - self.total_queued;
        let accepted = bytes.min(room);
        if accepted > 0 {
            *self.queued.entry(user).or_insert(0) += accepted;
            self.total_queued += accepted;
        }
        self.dropped_bytes += bytes - accepted;
        accepted
    }

    /// Remove (flush) all bytes of `user` without serving them. Returns the
    /// removed amount; the caller accounts for it.
    pub fn flush_user(&mut self, user: UserId) -> u64 {
        if let Some(bytes) = self.queued.remove(&user) {
            self.total_queued -= bytes;
            bytes
        } else {
            0
        }
    }

    /// Serve for `dt` seconds. Backlogged users share the node in equal time
    /// slices; each user's byte budget is its own link rate times its slice.
    /// Returns bytes served per user this step.
    pub fn advance(
        &mut self,
        dt_s: f64,
        rate_bps: &impl Fn(UserId) -> f64,
    ) -> BTreeMap<UserId, u64> {
        let n = self.queued.len();
        if n == 0 {
            return BTreeMap::new();
        }
        let share = dt_s / n as f64;
        let mut served = BTreeMap::new();
        let users: Vec<UserId> = self.queued.keys().copied().collect();
        for user in users {
            let budget = (rate_bps(user) * share / 8.0).floor() as u64;
            let queued = self.queued[&user];
            let take = queued.min(budget);
            if take > 0 {
                served.insert(user, take);
                self.total_queued -= take;
                self.served_bytes += take;
                let remaining = queued - take;
                if remaining == 0 {
                    self.queued.remove(&user);
                } else {
                    self.queued.insert(user, remaining);
                }
            }
        }
        served
    }
}

/// Shannon-style link rate with an efficiency factor and a hard cap.
pub fn serve_rate_bps(sinr_db: f64, bandwidth_hz: f64, efficiency: f64, cap_bps: f64) -> f64 {
    if sinr_db == f64::NEG_INFINITY {
        return 0.0;
    }
    let snr = 10f64.powf(sinr_db / 10.0);
    (efficiency * bandwidth_hz * (1.0 + snr).log2()).min(cap_bps)
}

/// Split `bytes` across WATs proportionally to percentage weights, in
/// integer bytes. The rounding remainder goes to the largest weight (ties
/// to the earlier WAT), so the shares always sum to `bytes` exactly when
/// any weight is positive.
pub fn split_by_weights(bytes: u64, weights: &crate::wat::PerWat<f64>) -> crate::wat::PerWat<u64> {
    use crate::wat::{PerWat, Wat};
    let total: f64 = Wat::ALL.iter().map(|&w| *weights.get(w)).sum();
    if total <= 0.0 {
        return PerWat::splat(0);
    }
    let mut shares = PerWat::splat(0u64);
    let mut assigned = 0u64;
    let mut largest = (f64::MIN, Wat::FiveG);
    for wat in Wat::ALL {
        let w = *weights.get(wat);
        if w > largest.0 {
            largest = (w, wat);
        }
        let share = (bytes as f64 * w / total).floor() as u64;
        *shares.get_mut(wat) = share;
        assigned += share;
    }
    *shares.get_mut(largest.1) += bytes - assigned;
    shares
}

/// Head-of-line drain estimate for one user at one node, milliseconds.
/// Under equal time sharing the user's effective rate is `rate / n`, so the
/// estimate is `queued * n / rate`, capped at the reporting cap. An idle
/// user reports 0.
pub fn user_delay_ms(queue: &NodeQueue, user: UserId, rate_bps: f64, cap_ms: f64) -> f64 {
    let queued = queue.queued_for(user);
    if queued == 0 {
        return 0.0;
    }
    if rate_bps <= 0.0 {
        return cap_ms;
    }
    let n = queue.backlogged_users().max(1) as f64;
    let ms = queued as f64 * 8.0 * n / rate_bps * 1000.0;
    ms.min(cap_ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serve_rate_known_points() {
        // SINR 0 dB, 20 MHz, efficiency 1: log2(2) = 1 => 20 Mbps.
        let r = serve_rate_bps(0.0, 20e6, 1.0, f64::INFINITY);
        assert!((r - 20e6).abs() < 1e-6);
        // SINR 29 dB, 80 MHz, efficiency 0.6: ~462.5 Mbps (50-digit oracle).
        let r = serve_rate_bps(29.0, 80e6, 0.6, f64::INFINITY);
        assert!((r - 462_499_515.759_438_4).abs() / r < 1e-12, "r = {r}");
        // No link serves nothing; cap binds.
        assert_eq!(serve_rate_bps(f64::NEG_INFINITY, 80e6, 0.6, 1e9), 0.0);
        assert_eq!(serve_rate_bps(60.0, 80e6, 1.0, 1e6), 1e6);
    }

    #[test]
    fn enqueue_respects_capacity_and_counts_drops() {
        let mut q = NodeQueue::new(NodeId(1), 1000);
        assert_eq!(q.enqueue(UserId(1), 600), 600);
        assert_eq!(q.enqueue(UserId(2), 600), 400);
        assert_eq!(q.total_queued(), 1000);
        assert_eq!(q.dropped_bytes, 200);
        assert!((q.buffer_pct() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn advance_empty_queue_is_noop() {
        let mut q = NodeQueue::new(NodeId(1), 1000);
        let served = q.advance(0.1, &|_| 1e6);
        assert!(served.is_empty());
        assert_eq!(q.total_queued(), 0);
    }

    #[test]
    fn advance_sole_user_served_at_full_rate() {
        let mut q = NodeQueue::new(NodeId(1), 10_000_000);
        q.enqueue(UserId(1), 5_000_000);
        // 8 Mbps for 1 s = 1 MB.
        let served = q.advance(1.0, &|_| 8e6);
        assert_eq!(served[&UserId(1)], 1_000_000);
        assert_eq!(q.total_queued(), 4_000_000);
    }

    #[test]
    fn advance_two_users_split_time_equally() {
        let mut q = NodeQueue::new(NodeId(1), 10_000_000);
        q.enqueue(UserId(1), 5_000_000);
        q.enqueue(UserId(2), 5_000_000);
        let served = q.advance(1.0, &|_| 8e6);
        assert_eq!(served[&UserId(1)], 500_000);
        assert_eq!(served[&UserId(2)], 500_000);
    }

    #[test]
    fn byte_conservation_over_random_steps() {
        let mut q = NodeQueue::new(NodeId(1), 50_000);
        let mut offered = 0u64;
        for i in 0..200u64 {
            let bytes = (i * 7919) % 4000;
            offered += bytes;
            q.enqueue(UserId((i % 5) as u32), bytes);
            q.advance(0.1, &|u| 1e5 * (1 + u.0 as u64) as f64);
        }
        assert_eq!(offered, q.served_bytes + q.dropped_bytes + q.total_queued());
    }

    #[test]
    fn queue_drains_to_zero_without_arrivals() {
        let mut q = NodeQueue::new(NodeId(1), 1_000_000);
        q.enqueue(UserId(1), 800_000);
        q.enqueue(UserId(2), 100_000);
        let mut steps = 0;
        while q.total_queued() > 0 {
            q.advance(0.1, &|_| 8e6);
            steps += 1;
            assert!(steps < 100, "queue failed to drain");
        }
        assert_eq!(user_delay_ms(&q, UserId(1), 8e6, 100.0), 0.0);
    }

    #[test]
    fn delay_estimator() {
        let mut q = NodeQueue::new(NodeId(1), 10_000_000);
        // Idle user on an empty node: 0 ms.
        assert_eq!(user_delay_ms(&q, UserId(1), 1e8, 100.0), 0.0);
        // Sole user with 1 Mbit queued at 100 Mbps: 10 ms.
        q.enqueue(UserId(1), 125_000);
        let d = user_delay_ms(&q, UserId(1), 1e8, 100.0);
        assert!((d - 10.0).abs() < 1e-9, "d = {d}");
        // A second backlogged user halves the effective rate.
        q.enqueue(UserId(2), 125_000);
        let d = user_delay_ms(&q, UserId(1), 1e8, 100.0);
        assert!((d - 20.0).abs() < 1e-9, "d = {d}");
        // Heavy backlog reports exactly the cap.
        q.enqueue(UserId(1), 8_000_000);
        assert_eq!(user_delay_ms(&q, UserId(1), 1e8, 100.0), 100.0);
        // No rate: cap.
        assert_eq!(user_delay_ms(&q, UserId(1), 0.0, 100.0), 100.0);
    }

    #[test]
    fn split_by_weights_examples() {
        use crate::wat::PerWat;
        // Everything to one WAT.
        let s = split_by_weights(1_000_000, &PerWat::new(100.0, 0.0, 0.0));
        assert_eq!((s.five_g, s.wifi, s.lifi), (1_000_000, 0, 0));
        // Even split between two WATs.
        let s = split_by_weights(1_000_000, &PerWat::new(50.0, 0.0, 50.0));
        assert_eq!((s.five_g, s.wifi, s.lifi), (500_000, 0, 500_000));
        // Rounding remainder lands on the largest weight, total preserved.
        let s = split_by_weights(100, &PerWat::new(49.0, 22.0, 29.0));
        assert_eq!(s.five_g + s.wifi + s.lifi, 100);
        assert_eq!((s.five_g, s.wifi, s.lifi), (49, 22, 29));
        let s = split_by_weights(10, &PerWat::new(33.3, 33.3, 33.4));
        assert_eq!(s.five_g + s.wifi + s.lifi, 10);
        // All-zero weights split nothing.
        let s = split_by_weights(10, &PerWat::splat(0.0));
        assert_eq!((s.five_g, s.wifi, s.lifi), (0, 0, 0));
    }

    #[test]
    fn flush_removes_user_bytes() {
        let mut q = NodeQueue::new(NodeId(1), 1000);
        q.enqueue(UserId(1), 300);
        q.enqueue(UserId(2), 200);
        assert_eq!(q.flush_user(UserId(1)), 300);
        assert_eq!(q.flush_user(UserId(1)), 0);
        assert_eq!(q.total_queued(), 200);
    }
}
