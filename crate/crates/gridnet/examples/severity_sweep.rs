//! Six-level severity classification of the 2000-bus star attack sweep,
//! replayed from the published per-utility results.
//!
//! ```bash
//! cargo run --example severity_sweep
//! ```

use gridnet::cases::BuiltinCase;
use gridnet::io::severity_to_csv;
use gridnet::scenario::severity_report_from_fixtures;
use gridnet::topology::TopologyKind;

fn main() {
    let report = severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Star).unwrap();
    println!(
        "case {}, {} wiring, {} utilities, classified: {}\n",
        report.case_name,
        report.kind,
        report.records.len(),
        report.classified
    );
    println!(
        "{:<14} {:<12} {:>6} {:>6} {:>6} {:>7}",
        "status", "utility", "a0", "a1", "lost", "score"
    );
    for r in &report.records {
        println!(
            "{:<14} {:<12} {:>6} {:>6} {:>6} {:>7.3}",
            r.severity.map(|s| s.name()).unwrap_or("NA"),
            r.utility,
            r.alpha0,
            r.alpha1,
            r.substations_lost,
            r.score.unwrap_or(0.0),
        );
    }
    if let Some(normal) = &report.normal_alpha {
        println!("\nbaseline (no attack): alpha0 {} alpha1 {}", normal.alpha0, normal.alpha1);
    }
    println!("\nCSV layout:\n{}", severity_to_csv(&report));
}
