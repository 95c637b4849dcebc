//! Hybrid wiring derivation for the 2000-bus case: compare per-utility
//! severity under star and radial wiring, pick the safer side per utility,
//! and run the same uniform load through all three topologies.
//!
//! ```bash
//! cargo run --example hybrid_topology
//! ```

use gridnet::cases::{synth_case, BuiltinCase};
use gridnet::scenario::{derive_hybrid, severity_report_from_fixtures};
use gridnet::sim::{run_simulation, LoadModel, SimParams, SizeModel};
use gridnet::topology::{build_radial, build_star, TopologyKind};

fn main() {
    let entities = synth_case(BuiltinCase::Act2000);
    let star_report = severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Star).unwrap();
    let radial_report =
        severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Radial).unwrap();
    let (hybrid, decisions) = derive_hybrid(&entities, &star_report, &radial_report).unwrap();

    println!("{:<12} {:>6} {:>8} {:>8}", "utility", "R_s", "R_r", "choice");
    let mut star_count = 0;
    for d in &decisions {
        println!(
            "{:<12} {:>6} {:>8} {:>8}",
            d.utility, d.severity_star, d.severity_radial, d.choice
        );
        if d.choice == TopologyKind::Star {
            star_count += 1;
        }
    }
    println!(
        "\n{star_count} utilities wired star, {} radial",
        decisions.len() - star_count
    );

    // identical seed and load across the three wirings
    let params = SimParams {
        load: LoadModel::FixedCount { total: 2449, interval: 0.05 },
        size_model: SizeModel::Fixed(100),
        ..Default::default()
    };
    for (name, topo) in [
        ("star", build_star(&entities).unwrap()),
        ("radial", build_radial(&entities).unwrap()),
        ("hybrid", hybrid),
    ] {
        let started = std::time::Instant::now();
        let stats = run_simulation(&topo, &params, f64::INFINITY).unwrap();
        println!(
            "{name:>7}: delivered {} of {} packets in {:?} wall-clock",
            stats.total_delivered(),
            stats.total_generated(),
            started.elapsed()
        );
    }
}
