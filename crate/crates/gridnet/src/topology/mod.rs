//! Graph data model for utility communication networks.
//!
//! Entities (substations, utility control centers, regulatory units) are
//! expanded into network elements: each entity owns a router, substations own
//! packet generators, utilities and regulatory units own sinks and port
//! monitors, and utility routers fan out through a random brancher. The
//! [`Topology`] holds the directed element graph the simulator runs on.

mod build;
mod load;

pub use build::{
    build_hybrid, build_radial, build_star, haversine_km, hybrid_choice, nearest_utility,
};
pub use load::{check_manifest, load_manifest, load_topology, write_case_json, CaseManifest};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entity role within the grid hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    GenerationSubstation,
    TransmissionSubstation,
    Utility,
    Regulatory,
}

impl Role {
    pub fn is_substation(self) -> bool {
        matches!(self, Role::GenerationSubstation | Role::TransmissionSubstation)
    }
}

/// Kind of network element a node models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementKind {
    Generator,
    Router,
    Sink,
    Brancher,
    Monitor,
}

/// Wiring style of a constructed topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyKind {
    Star,
    Radial,
    Hybrid,
}

impl std::fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TopologyKind::Star => write!(f, "star"),
            TopologyKind::Radial => write!(f, "radial"),
            TopologyKind::Hybrid => write!(f, "hybrid"),
        }
    }
}

/// Geographic coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

/// One input entity from a case file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub role: Role,
    pub utility_label: Option<String>,
    pub regulatory_label: Option<String>,
    pub coord: GeoPoint,
}

/// One node of the element graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Element id, e.g. `rt:utility-03`.
    pub id: String,
    /// Owning entity id, e.g. `utility-03`.
    pub entity: String,
    pub role: Role,
    pub kind: ElementKind,
}

/// Errors for topology loading and construction.
#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("case contains no entities")]
    EmptyCase,
    #[error("no utilities available")]
    NoUtilities,
    #[error("substation {0} cannot be resolved to a utility")]
    UnresolvedUtility(String),
    #[error("utility region {0} has no transmission substation")]
    NoTransmissionInRegion(String),
    #[error("utility {0} missing from severity report")]
    MissingUtilityInReport(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("invalid topology: {0}")]
    Invalid(String),
}

/// Directed element graph plus the entity-level assignment maps.
#[derive(Debug, Serialize, Deserialize)]
pub struct Topology {
    pub kind: TopologyKind,
    nodes: Vec<Node>,
    out_edges: Vec<Vec<u32>>,
    /// Monitor element index paired with the router it observes.
    monitors: Vec<(u32, u32)>,
    /// Substation entity id to utility entity id.
    utility_of: BTreeMap<String, String>,
    /// Utility entity id to regulatory entity id.
    regulatory_of: BTreeMap<String, String>,
    #[serde(skip)]
    index: std::sync::OnceLock<BTreeMap<String, u32>>,
}

impl Clone for Topology {
    fn clone(&self) -> Self {
        Topology::from_parts(
            self.kind,
            self.nodes.clone(),
            self.out_edges.clone(),
            self.monitors.clone(),
            self.utility_of.clone(),
            self.regulatory_of.clone(),
        )
    }
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.nodes == other.nodes
            && self.out_edges == other.out_edges
            && self.monitors == other.monitors
            && self.utility_of == other.utility_of
            && self.regulatory_of == other.regulatory_of
    }
}

pub fn element_id(kind: ElementKind, entity: &str) -> String {
    let prefix = match kind {
        ElementKind::Generator => "pg",
        ElementKind::Router => "rt",
        ElementKind::Sink => "sink",
        ElementKind::Brancher => "br",
        ElementKind::Monitor => "mon",
    };
    format!("{prefix}:{entity}")
}

impl Topology {
    pub(crate) fn from_parts(
        kind: TopologyKind,
        nodes: Vec<Node>,
        out_edges: Vec<Vec<u32>>,
        monitors: Vec<(u32, u32)>,
        utility_of: BTreeMap<String, String>,
        regulatory_of: BTreeMap<String, String>,
    ) -> Self {
        Topology {
            kind,
            nodes,
            out_edges,
            monitors,
            utility_of,
            regulatory_of,
            index: std::sync::OnceLock::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: u32) -> &Node {
        &self.nodes[idx as usize]
    }

    pub fn out(&self, idx: u32) -> &[u32] {
        &self.out_edges[idx as usize]
    }

    pub fn monitors(&self) -> &[(u32, u32)] {
        &self.monitors
    }

    pub fn utility_of(&self) -> &BTreeMap<String, String> {
        &self.utility_of
    }

    pub fn regulatory_of(&self) -> &BTreeMap<String, String> {
        &self.regulatory_of
    }

    fn index(&self) -> &BTreeMap<String, u32> {
        self.index.get_or_init(|| {
            self.nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.id.clone(), i as u32))
                .collect()
        })
    }

    pub fn node_index(&self, id: &str) -> Option<u32> {
        self.index().get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.node_index(id).is_some()
    }

    /// Utility entity ids, sorted.
    pub fn utilities(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .nodes
            .iter()
            .filter(|n| n.role == Role::Utility && n.kind == ElementKind::Router)
            .map(|n| n.entity.clone())
            .collect();
        out.sort();
        out
    }

    /// Substation entity ids assigned to a utility, sorted.
    pub fn substations_of(&self, utility: &str) -> Vec<String> {
        self.utility_of
            .iter()
            .filter(|(_, u)| u.as_str() == utility)
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Returns a copy with `id` and all incident edges removed.
    pub fn remove_node(&self, id: &str) -> Result<Topology, TopologyError> {
        let victim = self
            .node_index(id)
            .ok_or_else(|| TopologyError::UnknownNode(id.to_string()))?;
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.nodes.len() - 1);
        for (i, n) in self.nodes.iter().enumerate() {
            if i as u32 != victim {
                remap[i] = nodes.len() as u32;
                nodes.push(n.clone());
            }
        }
        let mut out_edges = Vec::with_capacity(nodes.len());
        for (i, outs) in self.out_edges.iter().enumerate() {
            if i as u32 == victim {
                continue;
            }
            out_edges.push(
                outs.iter()
                    .filter(|&&t| t != victim)
                    .map(|&t| remap[t as usize])
                    .collect(),
            );
        }
        let monitors = self
            .monitors
            .iter()
            .filter(|&&(m, r)| m != victim && r != victim)
            .map(|&(m, r)| (remap[m as usize], remap[r as usize]))
            .collect();
        Ok(Topology::from_parts(
            self.kind,
            nodes,
            out_edges,
            monitors,
            self.utility_of.clone(),
            self.regulatory_of.clone(),
        ))
    }

    /// Element indices reaching a sink by directed edges.
    pub fn reaches_sink(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (from, outs) in self.out_edges.iter().enumerate() {
            for &to in outs {
                rev[to as usize].push(from as u32);
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32)
            .filter(|&i| self.nodes[i as usize].kind == ElementKind::Sink)
            .collect();
        for &s in &stack {
            seen[s as usize] = true;
        }
        while let Some(v) = stack.pop() {
            for &p in &rev[v as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Structural checks shared by all constructions.
    pub fn validate(&self) -> Result<(), TopologyError> {
        for (i, outs) in self.out_edges.iter().enumerate() {
            if outs.iter().any(|&t| t as usize == i) {
                return Err(TopologyError::Invalid(format!(
                    "self loop at {}",
                    self.nodes[i].id
                )));
            }
        }
        let reach = self.reaches_sink();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == ElementKind::Generator {
                if self.out_edges[i].len() != 1 {
                    return Err(TopologyError::Invalid(format!(
                        "generator {} out-degree {}",
                        n.id,
                        self.out_edges[i].len()
                    )));
                }
                if !reach[i] {
                    return Err(TopologyError::Invalid(format!(
                        "generator {} cannot reach a sink",
                        n.id
                    )));
                }
            }
        }
        // Routers chain through single out-edges; a revisit means a cycle.
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind != ElementKind::Router {
                continue;
            }
            let mut hops = 0usize;
            let mut cur = i;
            loop {
                let next = self.out_edges[cur]
                    .iter()
                    .map(|&t| t as usize)
                    .find(|&t| self.nodes[t].kind == ElementKind::Router);
                // Follow router-to-router edges only (branchers bridge one hop).
                let next = match next {
                    Some(t) => Some(t),
                    None => self.out_edges[cur]
                        .iter()
                        .map(|&t| t as usize)
                        .filter(|&t| self.nodes[t].kind == ElementKind::Brancher)
                        .flat_map(|t| self.out_edges[t].iter().map(|&x| x as usize))
                        .find(|&t| self.nodes[t].kind == ElementKind::Router),
                };
                match next {
                    Some(t) => {
                        hops += 1;
                        if hops > self.nodes.len() {
                            return Err(TopologyError::Invalid(format!(
                                "router cycle through {}",
                                n.id
                            )));
                        }
                        cur = t;
                    }
                    None => break,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_cell() -> Vec<Entity> {
        crate::cases::one_cell_case()
    }

    #[test]
    fn remove_leaf_drops_one_node_and_edge() {
        let topo = build_star(&star_cell()).unwrap();
        let sink = element_id(ElementKind::Sink, "regulatory-0");
        let reduced = topo.remove_node(&sink).unwrap();
        assert_eq!(reduced.node_count(), topo.node_count() - 1);
        assert_eq!(reduced.edge_count(), topo.edge_count() - 1);
        assert!(!reduced.contains(&sink));
        assert!(topo.contains(&sink));
    }

    #[test]
    fn remove_unknown_node_errors() {
        let topo = build_star(&star_cell()).unwrap();
        assert!(matches!(
            topo.remove_node("rt:nope"),
            Err(TopologyError::UnknownNode(_))
        ));
    }

    #[test]
    fn remove_hub_isolates_leaves() {
        // k-leaf star at the utility router: removing it cuts every substation chain.
        let topo = build_star(&crate::cases::synth_case(crate::cases::BuiltinCase::Act500)).unwrap();
        let hub = element_id(ElementKind::Router, "utility-00");
        let reduced = topo.remove_node(&hub).unwrap();
        let reach = reduced.reaches_sink();
        for (sub, util) in reduced.utility_of() {
            let rt = element_id(ElementKind::Router, sub);
            let idx = reduced.node_index(&rt).unwrap();
            if util == "utility-00" {
                assert!(!reach[idx as usize], "{sub} should be cut off");
            } else {
                assert!(reach[idx as usize], "{sub} should still reach a sink");
            }
        }
    }
}
