//! Discrete-event simulation and resilience analysis for utility
//! communication networks laid over synthetic grid cases.
//!
//! The crate builds star, radial, and hybrid communication topologies over
//! generation/transmission substations, utilities, and regulatory units,
//! simulates packet flow deterministically, scores routers with graph
//! centralities, ranks critical utilities through an exact assignment
//! optimization with a simulation-agreement penalty, classifies
//! denial-of-service impact into six severity levels, and can offload
//! designated routers to an external TCP peer.
//!
//! Run `cargo run --example <name>` for end-to-end walkthroughs of each
//! capability, or use the `gridnet` binary for the batch pipeline.

pub mod bridge;
pub mod cases;
pub mod cli;
pub mod fixtures;
pub mod io;
pub mod metrics;
pub mod rank;
pub mod scenario;
pub mod sim;
pub mod topology;

pub use sim::{run_simulation, Packet, SimParams, SimStats};
pub use topology::{build_hybrid, build_radial, build_star, load_topology, Topology};
