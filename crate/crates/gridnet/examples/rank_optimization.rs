//! The constrained ranking optimization on the published 500-bus star ranks:
//! solve for the optimized ranking at several penalty strengths and sweep for
//! the agreement thresholds.
//!
//! ```bash
//! cargo run --example rank_optimization
//! ```

use gridnet::cases::BuiltinCase;
use gridnet::fixtures::rank_inputs;
use gridnet::rank::{alpha_sweep, max_deviation, optimize_weights, solve_t, Weights};
use gridnet::topology::TopologyKind;

fn main() {
    let inputs = rank_inputs(BuiltinCase::Act500, TopologyKind::Star);
    let w = Weights::default();
    println!("weights a={} b={} c={}\n", w.a, w.b, w.c);

    println!("{:<12} {:>4} {:>4} {:>4} {:>4}", "utility", "sim", "cb", "x", "cc");
    for u in inputs.nodes() {
        println!(
            "{u:<12} {:>4} {:>4} {:>4} {:>4}",
            inputs.sim.rank_of(&u).unwrap(),
            inputs.betweenness.rank_of(&u).unwrap(),
            inputs.eigenvector.rank_of(&u).unwrap(),
            inputs.closeness.rank_of(&u).unwrap(),
        );
    }

    println!("\noptimized ranking T per penalty strength:");
    for alpha in [0.0, 0.05, 0.1, 0.5] {
        let t = solve_t(&inputs, &w, alpha).unwrap();
        let devs = max_deviation(&t, &inputs.sim);
        let vec: Vec<u32> = inputs.nodes().iter().map(|u| t.rank_of(u).unwrap()).collect();
        println!("  alpha {alpha:<5}: T = {vec:?}, max deviation from sim = {devs}");
    }

    let pair = alpha_sweep(&inputs, &w, 0.05).unwrap();
    println!("\nalpha sweep (step 0.05): alpha0 = {}, alpha1 = {}", pair.alpha0, pair.alpha1);

    let (best_w, _) = optimize_weights(&inputs);
    println!(
        "grid-searched weights at alpha=0: a={} b={} c={}",
        best_w.a, best_w.b, best_w.c
    );
}
