//! Builds the star and radial wirings of the 500-bus case and prints their
//! structure and global graph measures.
//!
//! ```bash
//! cargo run --example build_topologies
//! ```

use gridnet::cases::{synth_case, BuiltinCase};
use gridnet::metrics::{global_clustering, spectral_gap, UndirectedGraph};
use gridnet::topology::{build_radial, build_star, ElementKind, Role};

fn main() {
    let entities = synth_case(BuiltinCase::Act500);
    let by_role = |role: Role| entities.iter().filter(|e| e.role == role).count();
    println!(
        "case {}: {} generation, {} transmission, {} utilities, {} regulatory",
        BuiltinCase::Act500.name(),
        by_role(Role::GenerationSubstation),
        by_role(Role::TransmissionSubstation),
        by_role(Role::Utility),
        by_role(Role::Regulatory),
    );

    for topo in [build_star(&entities).unwrap(), build_radial(&entities).unwrap()] {
        let routers = topo
            .nodes()
            .iter()
            .filter(|n| n.kind == ElementKind::Router)
            .count();
        let generators = topo
            .nodes()
            .iter()
            .filter(|n| n.kind == ElementKind::Generator)
            .count();
        let g = UndirectedGraph::from_topology(&topo);
        println!(
            "\n{} wiring: {} elements / {} edges ({} routers, {} generators)",
            topo.kind,
            topo.node_count(),
            topo.edge_count(),
            routers,
            generators
        );
        println!(
            "  router backbone: {} nodes, {} edges",
            g.node_count(),
            g.edge_count()
        );
        println!(
            "  global clustering {:.4}, spectral gap {:.3e}",
            global_clustering(&g),
            spectral_gap(&g).unwrap()
        );
    }
}
