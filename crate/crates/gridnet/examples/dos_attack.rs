//! Paired-seed attack comparison: degrade one utility router's forwarding to
//! 1% and compare per-utility delivery against the untouched run.
//!
//! ```bash
//! cargo run --example dos_attack
//! ```

use gridnet::cases::{synth_case, BuiltinCase};
use gridnet::scenario::{delivery_ratio, dos_params};
use gridnet::sim::{run_simulation, SimParams};
use gridnet::topology::build_star;

fn main() {
    let topo = build_star(&synth_case(BuiltinCase::Act500)).unwrap();
    let params = SimParams::default();
    let until = 100.0;
    let target = "utility-01";

    let normal = run_simulation(&topo, &params, until).unwrap();
    let attacked = run_simulation(&topo, &dos_params(&params, target), until).unwrap();

    println!("attack on {target} (forwarding probability 0.01), horizon {until} s\n");
    println!("{:<12} {:>14} {:>14} {:>10}", "utility", "normal ratio", "attacked", "change");
    for u in topo.utilities() {
        let rn = delivery_ratio(&normal, &topo, &u);
        let rd = delivery_ratio(&attacked, &topo, &u);
        let change = if rn > 0.0 { (rd - rn) / rn * 100.0 } else { 0.0 };
        let marker = if u == target { "  <- target" } else { "" };
        println!("{u:<12} {rn:>14.5} {rd:>14.5} {change:>9.1}%{marker}");
    }

    let reg_normal = normal.sinks["sink:regulatory-0"].received;
    let reg_attacked = attacked.sinks["sink:regulatory-0"].received;
    println!("\nregulatory sink received: {reg_normal} normal vs {reg_attacked} under attack");
}
