//! Deterministic discrete-event engine for the element graph.

mod engine;
pub mod queue;
pub mod rng;
mod stats;

pub use engine::{brancher_route, run_simulation, run_simulation_with_transit, ExternalHop};
pub use rng::{sample_truncated_exp, Purpose, Stream};
pub use stats::{average_delay, NodeCounters, QueueSample, ServiceLogEntry, SimStats, SinkStats};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A simulated datagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packet {
    /// Strictly increasing per generator.
    pub seq: u64,
    /// Creation time in whole microseconds (floor of the virtual clock).
    pub created_at_us: u64,
    /// Size in bytes, at least 1.
    pub size: u64,
    /// Index of the source entity in the topology's node order.
    pub src: u32,
    /// Flow id; the utility region the source belongs to.
    pub flow: u32,
}

/// How generators emit traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LoadModel {
    /// Truncated-exponential inter-arrival times, open-ended.
    Exponential,
    /// A fixed total packet budget spread round-robin over generators, each
    /// emitting on a fixed interval. Emission times are identical across
    /// topologies carrying the same generator set.
    FixedCount { total: u64, interval: f64 },
}

/// How packet sizes are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SizeModel {
    /// Exponential with mean `mean_packet_size`.
    Exponential,
    /// Uniform packets of exactly this many bytes.
    Fixed(u64),
}

/// Per-node parameter overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeOverrides {
    pub port_rate: Option<f64>,
    pub forward_prob: Option<f64>,
    /// `Some(None)` lifts the byte cap for this node.
    pub queue_capacity: Option<Option<u64>>,
    pub mean_size: Option<f64>,
    pub interarrival_mean: Option<f64>,
    /// `Some(None)` removes the inter-arrival clamp.
    pub interarrival_cap: Option<Option<f64>>,
    /// Stop the generator after this many packets.
    pub budget: Option<u64>,
}

/// Simulation parameters. Deserialization fills missing fields from the
/// defaults, so partial JSON override files work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Mean packet size in bytes.
    pub mean_packet_size: f64,
    /// Inter-arrival clamp in seconds; the draw mean equals the cap.
    pub interarrival_cap: f64,
    /// Router service rate in packets per second at the mean packet size.
    pub port_rate: f64,
    /// Monitor sampling clamp in samples per second.
    pub monitor_cap: f64,
    /// Interval between router service-log entries, seconds.
    pub service_log_interval: f64,
    /// Router queue capacity in bytes; `None` is unbounded.
    pub queue_capacity: Option<u64>,
    /// Probability a serviced packet is forwarded rather than dropped.
    pub forward_prob: f64,
    pub seed: u64,
    pub load: LoadModel,
    pub size_model: SizeModel,
    pub node_overrides: BTreeMap<String, NodeOverrides>,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            mean_packet_size: 3.4e6,
            interarrival_cap: 0.05,
            port_rate: 2.2,
            monitor_cap: 20.0,
            service_log_interval: 0.5,
            queue_capacity: None,
            forward_prob: 1.0,
            seed: 42,
            load: LoadModel::Exponential,
            size_model: SizeModel::Exponential,
            node_overrides: BTreeMap::new(),
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("mean_packet_size", self.mean_packet_size),
            ("interarrival_cap", self.interarrival_cap),
            ("port_rate", self.port_rate),
            ("monitor_cap", self.monitor_cap),
            ("service_log_interval", self.service_log_interval),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SimError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if !(self.forward_prob > 0.0 && self.forward_prob <= 1.0) {
            return Err(SimError::InvalidParams(
                "forward_prob must be in (0, 1]".to_string(),
            ));
        }
        for (node, o) in &self.node_overrides {
            if let Some(p) = o.forward_prob {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(SimError::InvalidParams(format!(
                        "{node}: forward_prob must be in (0, 1]"
                    )));
                }
            }
            for (name, v) in [
                ("port_rate", o.port_rate),
                ("mean_size", o.mean_size),
                ("interarrival_mean", o.interarrival_mean),
            ] {
                if let Some(v) = v {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(SimError::InvalidParams(format!(
                            "{node}: {name} must be positive"
                        )));
                    }
                }
            }
        }
        if let LoadModel::FixedCount { total: _, interval } = self.load {
            if !(interval > 0.0) || !interval.is_finite() {
                return Err(SimError::InvalidParams("load interval must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("branch probabilities must sum to 1, got {0}")]
    BadDistribution(f64),
    #[error("external transit failed at {node}: {source}")]
    TransitFailed {
        node: String,
        source: std::io::Error,
        partial: Box<SimStats>,
    },
}
