//! Local centrality measures.

use std::collections::{BTreeMap, VecDeque};

use super::{MetricsError, UndirectedGraph};

/// Mean of local clustering coefficients; nodes of degree below two
/// contribute zero.
pub fn global_clustering(g: &UndirectedGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for v in 0..n {
        let neigh = g.neighbors(v);
        let d = neigh.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for (i, &a) in neigh.iter().enumerate() {
            let adj_a = g.neighbors(a as usize);
            for &b in &neigh[i + 1..] {
                if adj_a.binary_search(&b).is_ok() {
                    links += 1;
                }
            }
        }
        total += 2.0 * links as f64 / (d * (d - 1)) as f64;
    }
    total / n as f64
}

/// Unnormalized node betweenness over unordered pairs, endpoints excluded.
/// Brandes' accumulation over ordered pairs, halved.
pub fn betweenness(g: &UndirectedGraph) -> BTreeMap<String, f64> {
    let n = g.node_count();
    let mut score = vec![0.0f64; n];
    let mut stack: Vec<u32> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();

    for s in 0..n {
        stack.clear();
        queue.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s as u32);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v as usize) {
                if dist[w as usize] < 0 {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
                if dist[w as usize] == dist[v as usize] + 1 {
                    sigma[w as usize] += sigma[v as usize];
                    preds[w as usize].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w as usize] {
                delta[v as usize] +=
                    sigma[v as usize] / sigma[w as usize] * (1.0 + delta[w as usize]);
            }
            if w as usize != s {
                score[w as usize] += delta[w as usize];
            }
        }
    }
    // ordered-pair accumulation counts each unordered pair twice
    let values: Vec<f64> = score.iter().map(|x| x / 2.0).collect();
    g.labels()
        .iter()
        .cloned()
        .zip(values)
        .collect()
}

/// Component-local closeness: inverse of the summed BFS distances to every
/// node reachable from `v`. Isolated nodes score zero.
pub fn closeness(g: &UndirectedGraph) -> Result<BTreeMap<String, f64>, MetricsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricsError::TooSmall { need: 2, have: n });
    }
    let mut out = BTreeMap::new();
    let mut dist = vec![-1i64; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        dist.iter_mut().for_each(|d| *d = -1);
        queue.clear();
        dist[v] = 0;
        queue.push_back(v as u32);
        let mut sum = 0i64;
        while let Some(x) = queue.pop_front() {
            sum += dist[x as usize];
            for &w in g.neighbors(x as usize) {
                if dist[w as usize] < 0 {
                    dist[w as usize] = dist[x as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        let score = if sum > 0 { 1.0 / sum as f64 } else { 0.0 };
        out.insert(g.labels()[v].clone(), score);
    }
    Ok(out)
}

/// Eigenvector centrality on the largest component: power iteration on the
/// shifted adjacency operator `A + I` (the shift keeps bipartite graphs, e.g.
/// stars and trees, from oscillating between the two extreme eigenvectors
/// while leaving eigenvectors unchanged). Scores are unit 2-norm over the
/// whole graph; nodes outside the component score zero.
pub fn eigenvector_centrality(
    g: &UndirectedGraph,
) -> Result<BTreeMap<String, f64>, MetricsError> {
    let comps = g.components();
    let comp = comps.first().ok_or(MetricsError::NoEdges)?;
    let edges_inside = comp
        .iter()
        .map(|&v| g.degree(v as usize))
        .sum::<usize>();
    if edges_inside == 0 {
        return Err(MetricsError::NoEdges);
    }

    let m = comp.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in comp.iter().enumerate() {
        local[v as usize] = i;
    }
    let mut x = vec![1.0f64 / (m as f64).sqrt(); m];
    let mut next = vec![0.0f64; m];
    let tol = 1e-10;
    let max_iters = 100_000;
    for _ in 0..max_iters {
        for (i, &v) in comp.iter().enumerate() {
            let mut acc = x[i]; // the +I shift
            for &w in g.neighbors(v as usize) {
                acc += x[local[w as usize]];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let diff = x
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        std::mem::swap(&mut x, &mut next);
        if diff < tol {
            break;
        }
    }

    let mut out: BTreeMap<String, f64> = g
        .labels()
        .iter()
        .map(|l| (l.clone(), 0.0))
        .collect();
    for (i, &v) in comp.iter().enumerate() {
        out.insert(g.labels()[v as usize].clone(), x[i].abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(u32, u32)]) -> UndirectedGraph {
        let labels = (0..n).map(|i| format!("n{i}")).collect();
        UndirectedGraph::from_edges(labels, edges)
    }

    #[test]
    fn clustering_triangle_is_one() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(global_clustering(&g), 1.0);
    }

    #[test]
    fn clustering_star_is_zero() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(global_clustering(&g), 0.0);
    }

    #[test]
    fn clustering_k4_minus_edge() {
        // K4 without (2,3): nodes 0,1 keep coefficient 5/6 average
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let got = global_clustering(&g);
        let want = (2.0 / 3.0 + 2.0 / 3.0 + 1.0 + 1.0) / 4.0;
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn betweenness_path3() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let b = betweenness(&g);
        assert_eq!(b["n1"], 1.0);
        assert_eq!(b["n0"], 0.0);
        assert_eq!(b["n2"], 0.0);
    }

    #[test]
    fn betweenness_triangle_all_zero() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let b = betweenness(&g);
        assert!(b.values().all(|&v| v == 0.0));
    }

    #[test]
    fn closeness_path3() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = closeness(&g).unwrap();
        assert!((c["n1"] - 0.5).abs() < 1e-12);
        assert!((c["n0"] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closeness_triangle() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = closeness(&g).unwrap();
        assert!(c.values().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn closeness_component_local_disjoint_edges() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        let c = closeness(&g).unwrap();
        assert!(c.values().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn eigenvector_complete_graph_uniform() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let x = eigenvector_centrality(&g).unwrap();
        let want = 0.5; // 1/sqrt(4)
        for v in x.values() {
            assert!((v - want).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvector_star_hub_dominates() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let x = eigenvector_centrality(&g).unwrap();
        for i in 1..5 {
            assert!(x["n0"] > x[&format!("n{i}")]);
        }
    }

    #[test]
    fn eigenvector_path3_ratio() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let x = eigenvector_centrality(&g).unwrap();
        // dominant eigenvector of P3 is proportional to (1, sqrt(2), 1)
        let norm = (1.0f64 + 2.0 + 1.0).sqrt();
        assert!((x["n0"] - 1.0 / norm).abs() < 1e-8);
        assert!((x["n1"] - 2.0f64.sqrt() / norm).abs() < 1e-8);
    }

    #[test]
    fn eigenvector_residual_bound() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        let x = eigenvector_centrality(&g).unwrap();
        let v: Vec<f64> = (0..6).map(|i| x[&format!("n{i}")]).collect();
        // Rayleigh quotient as lambda, then check the residual
        let ax: Vec<f64> = (0..6)
            .map(|i| g.neighbors(i).iter().map(|&w| v[w as usize]).sum::<f64>())
            .collect();
        let lambda: f64 = v.iter().zip(&ax).map(|(a, b)| a * b).sum();
        for i in 0..6 {
            assert!((ax[i] - lambda * v[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvector_no_edges_errors() {
        let g = graph(3, &[]);
        assert!(matches!(eigenvector_centrality(&g), Err(MetricsError::NoEdges)));
    }
}
