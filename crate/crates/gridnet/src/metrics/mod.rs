//! Graph metrics over the router backbone.
//!
//! The analysis graph keeps routers only: generators, sinks, and monitors are
//! instrumentation, and branchers collapse into a direct router-to-router
//! link. All measures treat the graph as undirected and unweighted.

mod centrality;
mod spectral;

pub use centrality::{betweenness, closeness, eigenvector_centrality, global_clustering};
pub use spectral::spectral_gap;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{ElementKind, Topology};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("graph too small: need at least {need} nodes, have {have}")]
    TooSmall { need: usize, have: usize },
    #[error("largest component has no edges")]
    NoEdges,
    #[error("empty restriction set")]
    EmptySet,
    #[error("node {0} missing from scores")]
    MissingNode(String),
    #[error("rank vector is not a permutation")]
    NotAPermutation,
}

/// Undirected, unweighted simple graph with stable string labels.
#[derive(Debug, Clone)]
pub struct UndirectedGraph {
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
}

impl UndirectedGraph {
    /// Builds from undirected edges over labelled nodes. Duplicate edges and
    /// self loops are discarded.
    pub fn from_edges(labels: Vec<String>, edges: &[(u32, u32)]) -> Self {
        let n = labels.len();
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            let (a, b) = (a.min(b), a.max(b));
            if a == b || !seen.insert((a, b)) {
                continue;
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        UndirectedGraph { labels, adj }
    }

    /// Router backbone of a topology: routers become nodes, branchers are
    /// collapsed, everything else is dropped. Labels are entity ids.
    pub fn from_topology(topo: &Topology) -> Self {
        let mut router_index: BTreeMap<u32, u32> = BTreeMap::new();
        let mut labels = Vec::new();
        for (i, n) in topo.nodes().iter().enumerate() {
            if n.kind == ElementKind::Router {
                router_index.insert(i as u32, labels.len() as u32);
                labels.push(n.entity.clone());
            }
        }
        let mut edges = Vec::new();
        for (&from, &a) in &router_index {
            // direct router successors, plus router successors one brancher away
            for &t in topo.out(from) {
                match topo.node(t).kind {
                    ElementKind::Router => edges.push((a, router_index[&t])),
                    ElementKind::Brancher => {
                        for &t2 in topo.out(t) {
                            if topo.node(t2).kind == ElementKind::Router {
                                edges.push((a, router_index[&t2]));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        Self::from_edges(labels, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Connected components as sorted node lists, largest first; ties broken
    /// by smallest member index.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<u32>> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = vec![start as u32];
            comp[start] = c;
            let mut stack = vec![start as u32];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v as usize] {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = c;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        out
    }
}

/// Centrality scores and global measures of one graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CentralityTable {
    pub betweenness: BTreeMap<String, f64>,
    pub eigenvector: BTreeMap<String, f64>,
    pub closeness: BTreeMap<String, f64>,
    pub spectral_gap: f64,
    pub clustering: f64,
}

impl CentralityTable {
    /// All measures of the router backbone of `topo`.
    pub fn compute(g: &UndirectedGraph) -> Result<Self, MetricsError> {
        Ok(CentralityTable {
            betweenness: betweenness(g),
            eigenvector: eigenvector_centrality(g)?,
            closeness: closeness(g)?,
            spectral_gap: spectral_gap(g)?,
            clustering: global_clustering(g),
        })
    }
}

/// Node ranking; rank 0 marks the most critical node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVector {
    ranks: BTreeMap<String, u32>,
}

impl RankVector {
    /// Validates that ranks form a permutation of `0..k`.
    pub fn new(ranks: BTreeMap<String, u32>) -> Result<Self, MetricsError> {
        let k = ranks.len() as u32;
        let mut seen = vec![false; k as usize];
        for &r in ranks.values() {
            if r >= k || seen[r as usize] {
                return Err(MetricsError::NotAPermutation);
            }
            seen[r as usize] = true;
        }
        Ok(RankVector { ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank_of(&self, node: &str) -> Option<u32> {
        self.ranks.get(node).copied()
    }

    pub fn as_map(&self) -> &BTreeMap<String, u32> {
        &self.ranks
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.ranks.keys()
    }
}

/// Ranks the restricted nodes by score, highest first; ties break toward the
/// lowest node id.
pub fn rank_from_scores(
    scores: &BTreeMap<String, f64>,
    restrict_to: &BTreeSet<String>,
) -> Result<RankVector, MetricsError> {
    if restrict_to.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let mut entries: Vec<(&String, f64)> = Vec::with_capacity(restrict_to.len());
    for node in restrict_to {
        let s = scores
            .get(node)
            .ok_or_else(|| MetricsError::MissingNode(node.clone()))?;
        entries.push((node, *s));
    }
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let ranks = entries
        .into_iter()
        .enumerate()
        .map(|(i, (node, _))| (node.clone(), i as u32))
        .collect();
    RankVector::new(ranks)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn path3() -> UndirectedGraph {
        UndirectedGraph::from_edges(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 2)],
        )
    }

    #[test]
    fn components_of_disjoint_edges() {
        let g = UndirectedGraph::from_edges(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[(0, 1), (2, 3)],
        );
        let comps = g.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![0, 1]);
    }

    #[test]
    fn rank_from_scores_orders_descending() {
        let scores: BTreeMap<String, f64> =
            [("u0".to_string(), 0.9), ("u1".to_string(), 0.1)].into();
        let restrict: BTreeSet<String> = scores.keys().cloned().collect();
        let rv = rank_from_scores(&scores, &restrict).unwrap();
        assert_eq!(rv.rank_of("u0"), Some(0));
        assert_eq!(rv.rank_of("u1"), Some(1));
    }

    #[test]
    fn rank_from_scores_tie_breaks_by_id() {
        let scores: BTreeMap<String, f64> =
            [("u0".to_string(), 0.4), ("u1".to_string(), 0.4)].into();
        let restrict: BTreeSet<String> = scores.keys().cloned().collect();
        let rv = rank_from_scores(&scores, &restrict).unwrap();
        assert_eq!(rv.rank_of("u0"), Some(0));
        assert_eq!(rv.rank_of("u1"), Some(1));
    }

    #[test]
    fn rank_from_scores_empty_set_errors() {
        let scores = BTreeMap::new();
        assert!(matches!(
            rank_from_scores(&scores, &BTreeSet::new()),
            Err(MetricsError::EmptySet)
        ));
    }

    #[test]
    fn rank_vector_rejects_non_permutation() {
        let ranks: BTreeMap<String, u32> = [("a".to_string(), 0), ("b".to_string(), 2)].into();
        assert!(matches!(RankVector::new(ranks), Err(MetricsError::NotAPermutation)));
    }

    #[test]
    fn relabeling_preserves_scores() {
        let g1 = path3();
        let g2 = UndirectedGraph::from_edges(
            vec!["x".into(), "y".into(), "z".into()],
            &[(0, 1), (1, 2)],
        );
        let b1 = betweenness(&g1);
        let b2 = betweenness(&g2);
        assert_eq!(b1["b"], b2["y"]);
        assert_eq!(b1["a"], b2["x"]);
    }

    #[test]
    fn star_topology_graph_has_no_triangles() {
        let topo =
            crate::topology::build_star(&crate::cases::synth_case(crate::cases::BuiltinCase::Act500))
                .unwrap();
        let g = UndirectedGraph::from_topology(&topo);
        assert_eq!(g.node_count(), 213);
        assert_eq!(global_clustering(&g), 0.0);
    }
}
