//! Bridged simulation runs.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::net::TcpStream;
use std::time::{Duration, Instant};

use crate::sim::{run_simulation_with_transit, ExternalHop, Packet, SimError, SimParams, SimStats};
use crate::topology::Topology;

use super::wire::{read_frame, WirePacket};
use super::{BridgeError, BridgePlan};

/// Outcome of a bridged run.
#[derive(Debug)]
pub struct BridgedRun {
    pub stats: SimStats,
    pub wall_clock: Duration,
    /// Frames sent to the peer, per offloaded node.
    pub sent: BTreeMap<String, u64>,
    /// Frames echoed back and re-injected, per offloaded node.
    pub reinjected: BTreeMap<String, u64>,
}

struct TcpHop {
    conns: BTreeMap<String, TcpStream>,
    sent: BTreeMap<String, u64>,
    reinjected: BTreeMap<String, u64>,
    mismatch: Option<String>,
}

impl ExternalHop for TcpHop {
    fn roundtrip(
        &mut self,
        node_entity: &str,
        src_entity: &str,
        pkt: &Packet,
    ) -> std::io::Result<Packet> {
        let conn = self.conns.get_mut(node_entity).ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::NotConnected, node_entity.to_string())
        })?;
        let frame = WirePacket {
            seq: pkt.seq,
            created_at_us: pkt.created_at_us,
            size: pkt.size,
            src: src_entity.to_string(),
            dst: node_entity.to_string(),
        };
        conn.write_all(&super::wire::encode_frame(&frame))?;
        conn.flush()?;
        *self.sent.entry(node_entity.to_string()).or_insert(0) += 1;

        let back = read_frame(conn)?.ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "peer closed mid-run")
        })?;
        if back != frame {
            self.mismatch = Some(format!(
                "sent seq {} size {}, got seq {} size {}",
                frame.seq, frame.size, back.seq, back.size
            ));
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "echoed frame differs",
            ));
        }
        *self.reinjected.entry(node_entity.to_string()).or_insert(0) += 1;
        // the echoed frame carries the same packet; size/created fields are
        // authoritative from the wire
        Ok(Packet {
            seq: back.seq,
            created_at_us: back.created_at_us,
            size: back.size,
            src: pkt.src,
            flow: pkt.flow,
        })
    }
}

/// Runs the simulation with the plan's routers offloaded over TCP. Virtual
/// dynamics match a standalone run; wall-clock time includes every peer
/// round-trip.
pub fn run_bridged(
    topo: &Topology,
    params: &SimParams,
    until: f64,
    plan: &BridgePlan,
) -> Result<BridgedRun, BridgeError> {
    let mut conns = BTreeMap::new();
    for (node, &port) in &plan.port_of {
        let stream = TcpStream::connect((plan.host.as_str(), port)).map_err(|source| {
            BridgeError::ConnectFailure { node: node.clone(), port, source }
        })?;
        stream.set_nodelay(true).ok();
        stream
            .set_read_timeout(Some(plan.timeout))
            .map_err(|source| BridgeError::ConnectFailure { node: node.clone(), port, source })?;
        conns.insert(node.clone(), stream);
    }
    let external: BTreeSet<String> = plan.port_of.keys().cloned().collect();
    let mut hop = TcpHop {
        conns,
        sent: BTreeMap::new(),
        reinjected: BTreeMap::new(),
        mismatch: None,
    };

    let started = Instant::now();
    let result = run_simulation_with_transit(topo, params, until, Some((&external, &mut hop)));
    let wall_clock = started.elapsed();

    match result {
        Ok(stats) => Ok(BridgedRun { stats, wall_clock, sent: hop.sent, reinjected: hop.reinjected }),
        Err(SimError::TransitFailed { node, source, partial }) => {
            if let Some(detail) = hop.mismatch {
                return Err(BridgeError::Malformed { node, detail });
            }
            match source.kind() {
                std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
                    Err(BridgeError::Timeout { node, partial })
                }
                _ => Err(BridgeError::ConnectionLost { node, partial }),
            }
        }
        Err(e) => Err(BridgeError::Sim(e)),
    }
}
