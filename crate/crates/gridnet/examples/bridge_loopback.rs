//! Co-simulation over TCP: utility and regulatory routers hosted by an
//! in-process loopback peer, with conservation accounting.
//!
//! ```bash
//! cargo run --example bridge_loopback
//! ```

use gridnet::bridge::{run_bridged, serve_peer, BridgePlan, Peer, PeerConfig};
use gridnet::cases::{synth_case, BuiltinCase};
use gridnet::sim::{run_simulation, LoadModel, SimParams, SizeModel};
use gridnet::topology::build_star;

fn main() {
    let topo = build_star(&synth_case(BuiltinCase::Act500)).unwrap();
    let plan = BridgePlan::for_topology(&topo, "127.0.0.1");
    println!(
        "offloading {} routers on ports {}..{}",
        plan.port_of.len(),
        plan.base_port,
        plan.base_port + plan.port_of.len() as u16 - 1
    );

    let peer = serve_peer(&plan, &PeerConfig::default()).unwrap();
    let params = SimParams {
        load: LoadModel::FixedCount { total: 481, interval: 0.05 },
        size_model: SizeModel::Fixed(100),
        ..Default::default()
    };

    let standalone_started = std::time::Instant::now();
    let standalone = run_simulation(&topo, &params, f64::INFINITY).unwrap();
    let standalone_wall = standalone_started.elapsed();

    let run = run_bridged(&topo, &params, f64::INFINITY, &plan).unwrap();
    let stats = peer.shutdown();

    println!(
        "\nstandalone: {} packets in {standalone_wall:?}",
        standalone.total_delivered()
    );
    println!(
        "bridged:    {} packets in {:?} ({} frames out, {} re-injected)",
        run.stats.total_delivered(),
        run.wall_clock,
        run.sent.values().sum::<u64>(),
        run.reinjected.values().sum::<u64>(),
    );
    println!(
        "virtual dynamics identical to standalone: {}",
        serde_json::to_vec(&standalone).unwrap() == serde_json::to_vec(&run.stats).unwrap()
    );
    println!("\nper-port peer counters:");
    print!("{}", Peer::stats_lines(&stats));
}
