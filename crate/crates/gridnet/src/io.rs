//! Report files: stats CSV/JSON, severity and decision tables, run manifests.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::metrics::CentralityTable;
use crate::scenario::{HybridDecision, SeverityReport};
use crate::sim::{SimParams, SimStats};
use crate::topology::Topology;

/// Per-node stats rows: `node,packets_in,packets_out,packets_dropped,mean_delay`.
/// The delay column is queue wait for routers and delivery delay for sinks.
pub fn stats_to_csv(stats: &SimStats) -> String {
    let mut out = String::from("node,packets_in,packets_out,packets_dropped,mean_delay\n");
    for (id, c) in &stats.nodes {
        let mean_delay = if let Some(sink) = stats.sinks.get(id) {
            if sink.delays.is_empty() {
                0.0
            } else {
                sink.delays.iter().sum::<f64>() / sink.delays.len() as f64
            }
        } else if c.processed > 0 {
            c.sum_wait / c.processed as f64
        } else {
            0.0
        };
        out.push_str(&format!(
            "{id},{},{},{},{}\n",
            c.packets_in, c.packets_out, c.packets_dropped, mean_delay
        ));
    }
    out
}

pub fn stats_to_json(stats: &SimStats) -> String {
    serde_json::to_string_pretty(stats).expect("stats serialize")
}

/// Severity table layout: one row per utility in report order, then the
/// baseline row.
pub fn severity_to_csv(report: &SeverityReport) -> String {
    let mut out =
        String::from("status,utility,alpha0,alpha1,substations_lost,regulatory_affected\n");
    for r in &report.records {
        let status = r.severity.map(|s| s.name()).unwrap_or("NA");
        out.push_str(&format!(
            "{status},{},{},{},{},{}\n",
            r.utility,
            r.alpha0,
            r.alpha1,
            r.substations_lost,
            r.regulatory_affected.as_deref().unwrap_or("NA"),
        ));
    }
    if let Some(normal) = &report.normal_alpha {
        out.push_str(&format!("Normal,NA,{},{},NA,NA\n", normal.alpha0, normal.alpha1));
    }
    out
}

pub fn severity_to_json(report: &SeverityReport) -> String {
    serde_json::to_string_pretty(report).expect("severity serialize")
}

/// Hybrid decision table: `utility,severity_star,severity_radial,choice`.
pub fn decisions_to_csv(decisions: &[HybridDecision]) -> String {
    let mut out = String::from("utility,severity_star,severity_radial,choice\n");
    for d in decisions {
        out.push_str(&format!(
            "{},{},{},{}\n",
            d.utility, d.severity_star, d.severity_radial, d.choice
        ));
    }
    out
}

/// Centrality export: `node,betweenness,eigenvector,closeness`.
pub fn centrality_to_csv(table: &CentralityTable) -> String {
    let mut out = String::from("node,betweenness,eigenvector,closeness\n");
    for (node, b) in &table.betweenness {
        out.push_str(&format!(
            "{node},{b},{},{}\n",
            table.eigenvector.get(node).copied().unwrap_or(0.0),
            table.closeness.get(node).copied().unwrap_or(0.0),
        ));
    }
    out
}

/// Edge-list export of the element graph plus enough structure to rebuild it.
pub fn topology_to_json(topo: &Topology) -> String {
    serde_json::to_string_pretty(topo).expect("topology serialize")
}

pub fn topology_from_json(text: &str) -> Result<Topology, serde_json::Error> {
    serde_json::from_str(text)
}

/// Static layout for plotting: `node,lat,lon` per entity.
pub fn layout_to_csv(entities: &[crate::topology::Entity]) -> String {
    let mut out = String::from("entity,lat,lon\n");
    for e in entities {
        out.push_str(&format!("{},{},{}\n", e.id, e.coord.lat_deg, e.coord.lon_deg));
    }
    out
}

/// Reproducibility sidecar written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub case: String,
    pub kind: Option<String>,
    pub seed: u64,
    pub until: Option<f64>,
    pub params: SimParams,
    /// Wall-clock seconds; excluded from determinism comparisons.
    pub wall_clock_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join("run_manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self).expect("manifest"))?;
        Ok(path)
    }

    /// Manifest JSON with the wall-clock field removed, for byte comparisons.
    pub fn json_without_wall_clock(text: &str) -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap_or_default();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_clock_s");
        }
        v
    }
}

/// Writes a file and returns its path.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Router delays as `router,mean_delay` rows, id order.
pub fn delays_to_csv(stats: &SimStats, nodes: &[String]) -> String {
    let mut out = String::from("router,mean_delay\n");
    let empty = Default::default();
    for n in nodes {
        let c: &crate::sim::NodeCounters = stats.nodes.get(n).unwrap_or(&empty);
        let d = if c.processed > 0 { c.sum_wait / c.processed as f64 } else { 0.0 };
        out.push_str(&format!("{n},{d}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_csv_is_stable() {
        let mut stats = SimStats::default();
        stats.nodes.insert(
            "rt:a".into(),
            crate::sim::NodeCounters {
                packets_in: 10,
                packets_out: 8,
                packets_dropped: 1,
                residual: 1,
                sum_wait: 4.0,
                processed: 8,
            },
        );
        let csv = stats_to_csv(&stats);
        assert!(csv.contains("rt:a,10,8,1,0.5"));
    }

    #[test]
    fn topology_json_roundtrip() {
        let topo = crate::topology::build_star(&crate::cases::one_cell_case()).unwrap();
        let text = topology_to_json(&topo);
        let back = topology_from_json(&text).unwrap();
        assert_eq!(topo, back);
    }

    #[test]
    fn manifest_wall_clock_stripping() {
        let a = r#"{"command":"x","wall_clock_s":1.5,"seed":42}"#;
        let b = r#"{"command":"x","wall_clock_s":9.9,"seed":42}"#;
        assert_eq!(
            RunManifest::json_without_wall_clock(a),
            RunManifest::json_without_wall_clock(b)
        );
    }

    #[test]
    fn severity_csv_has_normal_row() {
        let report = crate::scenario::severity_report_from_fixtures(
            crate::cases::BuiltinCase::Act2000,
            crate::topology::TopologyKind::Star,
        )
        .unwrap();
        let csv = severity_to_csv(&report);
        assert_eq!(csv.lines().count(), 1 + 20 + 1);
        assert!(csv.lines().last().unwrap().starts_with("Normal,NA,0.25,0.1"));
    }
}
