//! TCP co-simulation bridge.
//!
//! Utility and regulatory routers can be hosted by an external peer process.
//! Each offloaded router gets its own TCP port; the simulator sends every
//! packet arriving at such a router as a length-prefixed frame, blocks until
//! the peer echoes it back (virtual time paused), and re-injects it. The peer
//! applies the router service model in wall-clock time and paces its egress
//! to a configured throughput cap.

mod peer;
mod run;
mod wire;

pub use peer::{serve_peer, Peer, PeerConfig, PortStats};
pub use run::{run_bridged, BridgedRun};
pub use wire::{decode_frame, encode_frame, read_frame, write_frame, FrameError, WirePacket};

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::SimStats;
use crate::topology::{ElementKind, Role, Topology};

/// Low port base for small deployments.
pub const BASE_PORT_SMALL: u16 = 5000;
/// High port base once external-router fan-out gets large.
pub const BASE_PORT_LARGE: u16 = 35000;
/// Default modeled egress cap, bits per second.
pub const DEFAULT_THROUGHPUT_CAP: f64 = 60e6;
/// Default per-frame response deadline.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Port base as a function of external-router count: 25 or more moves to the
/// high range.
pub fn allocate_ports(n_external: usize) -> u16 {
    if n_external >= 25 {
        BASE_PORT_LARGE
    } else {
        BASE_PORT_SMALL
    }
}

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("bind failed on port {port}: {source}")]
    BindFailure { port: u16, source: std::io::Error },
    #[error("connect failed for {node} on port {port}: {source}")]
    ConnectFailure { node: String, port: u16, source: std::io::Error },
    #[error("peer connection lost at {node}")]
    ConnectionLost { node: String, partial: Box<SimStats> },
    #[error("no response from {node} within the deadline")]
    Timeout { node: String, partial: Box<SimStats> },
    #[error("frame mismatch at {node}: {detail}")]
    Malformed { node: String, detail: String },
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}

/// Which routers live on the peer and how to reach them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgePlan {
    pub host: String,
    pub base_port: u16,
    /// Entity id of every offloaded router, paired with its port.
    pub port_of: BTreeMap<String, u16>,
    /// Modeled egress cap at the peer, bits per second.
    pub throughput_cap_bps: f64,
    /// Per-frame response deadline.
    pub timeout: Duration,
}

impl BridgePlan {
    /// Offloads the utility and regulatory routers of a topology, one port
    /// per node starting at the range [`allocate_ports`] picks.
    pub fn for_topology(topo: &Topology, host: &str) -> BridgePlan {
        let mut external: Vec<String> = topo
            .nodes()
            .iter()
            .filter(|n| {
                n.kind == ElementKind::Router
                    && matches!(n.role, Role::Utility | Role::Regulatory)
            })
            .map(|n| n.entity.clone())
            .collect();
        external.sort();
        external.dedup();
        Self::for_nodes(external, host)
    }

    pub fn for_nodes(external: Vec<String>, host: &str) -> BridgePlan {
        let base_port = allocate_ports(external.len());
        let port_of = external
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, base_port + i as u16))
            .collect();
        BridgePlan {
            host: host.to_string(),
            base_port,
            port_of,
            throughput_cap_bps: DEFAULT_THROUGHPUT_CAP,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn external_nodes(&self) -> impl Iterator<Item = &String> {
        self.port_of.keys()
    }
}
