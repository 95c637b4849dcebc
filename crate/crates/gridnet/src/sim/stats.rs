//! Per-run statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeCounters {
    pub packets_in: u64,
    pub packets_out: u64,
    pub packets_dropped: u64,
    /// Packets still queued (or in service) at the end of the run.
    pub residual: u64,
    /// Summed queue waiting time of serviced packets, seconds.
    pub sum_wait: f64,
    /// Packets that entered service.
    pub processed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueSample {
    pub time: f64,
    pub bytes: u64,
    pub len: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceLogEntry {
    pub time: f64,
    pub avg_wait: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SinkStats {
    pub received: u64,
    pub delays: Vec<f64>,
    pub interarrivals: Vec<f64>,
}

/// Everything a run records, keyed by element id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub until: f64,
    pub events_processed: u64,
    pub nodes: BTreeMap<String, NodeCounters>,
    pub queue_samples: BTreeMap<String, Vec<QueueSample>>,
    pub service_log: BTreeMap<String, Vec<ServiceLogEntry>>,
    pub sinks: BTreeMap<String, SinkStats>,
    /// Packets created, by source entity id.
    pub generated_by_entity: BTreeMap<String, u64>,
    /// Packets absorbed at any sink, by source entity id.
    pub delivered_by_entity: BTreeMap<String, u64>,
}

/// Queue waiting time over packets processed; zero when nothing was serviced.
pub fn average_delay(stats: &SimStats, node: &str) -> Result<f64, SimError> {
    let c = stats
        .nodes
        .get(node)
        .ok_or_else(|| SimError::UnknownNode(node.to_string()))?;
    if c.processed == 0 {
        Ok(0.0)
    } else {
        Ok(c.sum_wait / c.processed as f64)
    }
}

impl SimStats {
    /// Total packets absorbed across all sinks.
    pub fn total_delivered(&self) -> u64 {
        self.sinks.values().map(|s| s.received).sum()
    }

    /// Total packets created across all generators.
    pub fn total_generated(&self) -> u64 {
        self.generated_by_entity.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_delay_zero_when_idle() {
        let mut stats = SimStats::default();
        stats.nodes.insert("rt:a".into(), NodeCounters::default());
        assert_eq!(average_delay(&stats, "rt:a").unwrap(), 0.0);
    }

    #[test]
    fn average_delay_hand_trace() {
        let mut stats = SimStats::default();
        stats.nodes.insert(
            "rt:a".into(),
            NodeCounters { sum_wait: 4.0, processed: 2, ..Default::default() },
        );
        assert_eq!(average_delay(&stats, "rt:a").unwrap(), 2.0);
    }

    #[test]
    fn average_delay_unknown_node() {
        let stats = SimStats::default();
        assert!(matches!(
            average_delay(&stats, "rt:none"),
            Err(SimError::UnknownNode(_))
        ));
    }
}
