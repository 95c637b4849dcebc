//! Independent oracles shared by the integration suites: a Jacobi
//! eigensolver, exhaustive centrality computations, and pseudo-random graph
//! generation. Everything here recomputes results from definitions, not
//! through the library's algorithms.

#![allow(dead_code)]

use gridnet::metrics::UndirectedGraph;

pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = self.0;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^ (x >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random connected graph: a random spanning tree plus extra random edges.
pub fn random_connected_graph(seed: u64, n: usize, extra_edges: usize) -> UndirectedGraph {
    let mut rng = SplitMix(seed);
    let labels = (0..n).map(|i| format!("n{i}")).collect();
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.below(v) as u32, v as u32));
    }
    for _ in 0..extra_edges {
        let a = rng.below(n) as u32;
        let b = rng.below(n) as u32;
        if a != b {
            edges.push((a, b));
        }
    }
    UndirectedGraph::from_edges(labels, &edges)
}

pub fn adjacency_matrix(g: &UndirectedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for v in 0..n {
        for &w in g.neighbors(v) {
            a[v][w as usize] = 1.0;
        }
    }
    a
}

pub fn normalized_laplacian_matrix(g: &UndirectedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut l = vec![vec![0.0; n]; n];
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.degree(v);
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64).sqrt()
            }
        })
        .collect();
    for v in 0..n {
        if g.degree(v) > 0 {
            l[v][v] = 1.0;
        }
        for &w in g.neighbors(v) {
            l[v][w as usize] = -inv_sqrt[v] * inv_sqrt[w as usize];
        }
    }
    l
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns ascending
/// eigenvalues and matching eigenvectors (rows of the returned matrix).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Betweenness by explicit enumeration of all simple paths per pair.
pub fn brute_betweenness(g: &UndirectedGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![s];
            let mut visited = vec![false; n];
            visited[s] = true;
            enumerate_paths(g, s, t, &mut stack, &mut visited, &mut paths);
            if paths.is_empty() {
                continue;
            }
            let shortest = paths.iter().map(Vec::len).min().unwrap();
            let on_shortest: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == shortest).collect();
            let sigma = on_shortest.len() as f64;
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let through = on_shortest.iter().filter(|p| p.contains(&v)).count() as f64;
                score[v] += through / sigma;
            }
        }
    }
    score
}

fn enumerate_paths(
    g: &UndirectedGraph,
    at: usize,
    t: usize,
    stack: &mut Vec<usize>,
    visited: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if at == t {
        out.push(stack.clone());
        return;
    }
    for &w in g.neighbors(at) {
        let w = w as usize;
        if !visited[w] {
            visited[w] = true;
            stack.push(w);
            enumerate_paths(g, w, t, stack, visited, out);
            stack.pop();
            visited[w] = false;
        }
    }
}

/// Component-local closeness from Floyd-Warshall distances.
pub fn brute_closeness(g: &UndirectedGraph) -> Vec<f64> {
    let n = g.node_count();
    let inf = f64::INFINITY;
    let mut d = vec![vec![inf; n]; n];
    for v in 0..n {
        d[v][v] = 0.0;
        for &w in g.neighbors(v) {
            d[v][w as usize] = 1.0;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let sum: f64 = (0..n).filter(|&u| d[v][u].is_finite()).map(|u| d[v][u]).sum();
            if sum > 0.0 {
                1.0 / sum
            } else {
                0.0
            }
        })
        .collect()
}

/// Global clustering from the adjacency matrix definition.
pub fn brute_clustering(g: &UndirectedGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let a = adjacency_matrix(g);
    let mut total = 0.0;
    for v in 0..n {
        let neigh: Vec<usize> = (0..n).filter(|&u| a[v][u] > 0.0).collect();
        let d = neigh.len();
        if d < 2 {
            continue;
        }
        let mut links = 0;
        for i in 0..d {
            for j in (i + 1)..d {
                if a[neigh[i]][neigh[j]] > 0.0 {
                    links += 1;
                }
            }
        }
        total += 2.0 * links as f64 / (d * (d - 1)) as f64;
    }
    total / n as f64
}

/// Dominant eigenvector of the adjacency matrix by Jacobi, absolute values,
/// unit 2-norm. Connected input assumed.
pub fn brute_eigenvector(g: &UndirectedGraph) -> Vec<f64> {
    let (vals, vecs) = jacobi_eigen(adjacency_matrix(g));
    let top = vals.len() - 1;
    let mut v: Vec<f64> = vecs[top].iter().map(|x| x.abs()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Exhaustive minimum-cost assignment with lexicographic tie-break.
pub fn brute_assignment(cost: &[Vec<i128>]) -> (Vec<usize>, i128) {
    let n = cost.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(i128, Vec<usize>)> = None;
    permute(&mut perm, 0, &mut |p: &[usize]| {
        let total: i128 = p.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        match &best {
            None => best = Some((total, p.to_vec())),
            Some((bt, bp)) => {
                if total < *bt || (total == *bt && p < bp.as_slice()) {
                    best = Some((total, p.to_vec()));
                }
            }
        }
    });
    let (t, p) = best.unwrap();
    (p, t)
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}
