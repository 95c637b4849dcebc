//! The external peer: one listener per offloaded router.
//!
//! For every received frame the peer samples the router service model in
//! wall-clock time, paces its modeled egress to the throughput cap, and
//! echoes the frame back. Counters are per port; a stats line per port is
//! printed on shutdown in the form `port <port> node <id> in <n> out <n>`.

use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crate::sim::{Purpose, Stream};

use super::wire::{read_frame, write_frame};
use super::{BridgeError, BridgePlan};

/// Service model and pacing applied by the peer.
#[derive(Debug, Clone)]
pub struct PeerConfig {
    /// Packets per second at the mean packet size.
    pub port_rate: f64,
    /// Mean packet size the service scale is anchored to, bytes.
    pub mean_packet_size: f64,
    pub seed: u64,
}

impl Default for PeerConfig {
    fn default() -> Self {
        PeerConfig { port_rate: 2.2, mean_packet_size: 3.4e6, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortStats {
    pub node: String,
    pub port: u16,
    pub frames_in: u64,
    pub frames_out: u64,
    pub malformed: u64,
}

struct PortShared {
    node: String,
    port: u16,
    frames_in: AtomicU64,
    frames_out: AtomicU64,
    malformed: AtomicU64,
}

/// A running peer; drop or [`Peer::shutdown`] stops it.
pub struct Peer {
    stop: Arc<AtomicBool>,
    handles: Vec<JoinHandle<()>>,
    ports: Vec<Arc<PortShared>>,
}

/// Binds every port in the plan and serves frames until shutdown.
pub fn serve_peer(plan: &BridgePlan, config: &PeerConfig) -> Result<Peer, BridgeError> {
    let stop = Arc::new(AtomicBool::new(false));
    let mut handles = Vec::new();
    let mut ports = Vec::new();
    for (node, &port) in &plan.port_of {
        let listener = TcpListener::bind((plan.host.as_str(), port))
            .map_err(|source| BridgeError::BindFailure { port, source })?;
        listener
            .set_nonblocking(true)
            .map_err(|source| BridgeError::BindFailure { port, source })?;
        let shared = Arc::new(PortShared {
            node: node.clone(),
            port,
            frames_in: AtomicU64::new(0),
            frames_out: AtomicU64::new(0),
            malformed: AtomicU64::new(0),
        });
        ports.push(shared.clone());
        let stop_flag = stop.clone();
        let cfg = config.clone();
        let cap_bps = plan.throughput_cap_bps;
        handles.push(std::thread::spawn(move || {
            port_loop(listener, shared, cfg, cap_bps, stop_flag)
        }));
    }
    Ok(Peer { stop, handles, ports })
}

fn port_loop(
    listener: TcpListener,
    shared: Arc<PortShared>,
    cfg: PeerConfig,
    cap_bps: f64,
    stop: Arc<AtomicBool>,
) {
    while !stop.load(Ordering::Relaxed) {
        match listener.accept() {
            Ok((stream, _)) => {
                stream.set_nodelay(true).ok();
                // blocking per-connection service; one connection at a time
                stream.set_nonblocking(false).ok();
                serve_connection(stream, &shared, &cfg, cap_bps, &stop);
            }
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                std::thread::sleep(Duration::from_millis(2));
            }
            Err(_) => break,
        }
    }
}

fn serve_connection(
    mut stream: TcpStream,
    shared: &PortShared,
    cfg: &PeerConfig,
    cap_bps: f64,
    stop: &AtomicBool,
) {
    let mut service_rng = Stream::element(cfg.seed, &shared.node, Purpose::Service);
    stream.set_read_timeout(Some(Duration::from_millis(50))).ok();
    let mut egress_free_at = Instant::now();
    loop {
        if stop.load(Ordering::Relaxed) {
            return;
        }
        let pkt = match read_frame(&mut stream) {
            Ok(Some(pkt)) => pkt,
            Ok(None) => return,
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                continue;
            }
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                shared.malformed.fetch_add(1, Ordering::Relaxed);
                return;
            }
            Err(_) => return,
        };
        shared.frames_in.fetch_add(1, Ordering::Relaxed);

        // service time at wall-clock speed, scaled by packet size
        let scale = pkt.size as f64 / cfg.mean_packet_size;
        let service = service_rng.exp(1.0 / cfg.port_rate) * scale;
        if service > 0.0 {
            std::thread::sleep(Duration::from_secs_f64(service.min(10.0)));
        }
        // pace modeled egress bits to the cap
        let now = Instant::now();
        if egress_free_at > now {
            std::thread::sleep(egress_free_at - now);
        }
        let tx_time = pkt.size as f64 * 8.0 / cap_bps;
        egress_free_at = Instant::now() + Duration::from_secs_f64(tx_time);

        if write_frame(&mut stream, &pkt).and_then(|_| stream.flush()).is_err() {
            return;
        }
        shared.frames_out.fetch_add(1, Ordering::Relaxed);
    }
}

impl Peer {
    pub fn stats(&self) -> Vec<PortStats> {
        self.ports
            .iter()
            .map(|p| PortStats {
                node: p.node.clone(),
                port: p.port,
                frames_in: p.frames_in.load(Ordering::Relaxed),
                frames_out: p.frames_out.load(Ordering::Relaxed),
                malformed: p.malformed.load(Ordering::Relaxed),
            })
            .collect()
    }

    /// Stops all listeners and returns final per-port counters.
    pub fn shutdown(mut self) -> Vec<PortStats> {
        self.stop.store(true, Ordering::Relaxed);
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
        self.stats()
    }

    /// The plain-text stats lines printed on shutdown.
    pub fn stats_lines(stats: &[PortStats]) -> String {
        let mut out = String::new();
        for s in stats {
            out.push_str(&format!(
                "port {} node {} in {} out {}\n",
                s.port, s.node, s.frames_in, s.frames_out
            ));
        }
        out
    }
}

impl Drop for Peer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}
