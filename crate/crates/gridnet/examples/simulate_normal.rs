//! Normal-condition run of the 500-bus star network: packet counters and the
//! delay-based criticality ranking of the utility routers.
//!
//! ```bash
//! cargo run --example simulate_normal
//! ```

use gridnet::cases::{synth_case, BuiltinCase};
use gridnet::scenario::simulation_rank;
use gridnet::sim::{average_delay, run_simulation, SimParams};
use gridnet::topology::{build_star, element_id, ElementKind};

fn main() {
    let topo = build_star(&synth_case(BuiltinCase::Act500)).unwrap();
    let params = SimParams::default();
    let until = 100.0;
    let stats = run_simulation(&topo, &params, until).unwrap();

    println!(
        "simulated {until} s: {} packets generated, {} delivered, {} events",
        stats.total_generated(),
        stats.total_delivered(),
        stats.events_processed
    );

    let utilities = topo.utilities();
    let rank = simulation_rank(&stats, &utilities).unwrap();
    println!("\nutility ranking by mean router delay (rank 0 = most critical):");
    let mut rows: Vec<(&String, u32)> = rank.as_map().iter().map(|(u, &r)| (u, r)).collect();
    rows.sort_by_key(|&(_, r)| r);
    for (u, r) in rows {
        let delay = average_delay(&stats, &element_id(ElementKind::Router, u)).unwrap();
        println!("  rank {r}: {u} (mean wait {delay:.2} s)");
    }

    let reg_sink = "sink:regulatory-0";
    if let Some(sink) = stats.sinks.get(reg_sink) {
        let mean = sink.delays.iter().sum::<f64>() / sink.delays.len().max(1) as f64;
        println!("\nregulatory sink: {} packets, mean end-to-end delay {mean:.2} s", sink.received);
    }
}
