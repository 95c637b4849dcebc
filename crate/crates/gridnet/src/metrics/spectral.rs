//! Normalized-Laplacian spectral gap.

use nalgebra::DMatrix;

use super::{MetricsError, UndirectedGraph};

/// Node count up to which the gap is taken from a dense symmetric
/// eigendecomposition; larger connected graphs use a deflated power
/// iteration.
const DENSE_LIMIT: usize = 2048;

/// First nontrivial eigenvalue of `L = I - D^{-1/2} A D^{-1/2}`.
///
/// Disconnected graphs have eigenvalue zero with multiplicity equal to the
/// component count, so the gap is exactly zero; that case is answered from
/// the component structure without an eigensolve. Isolated nodes contribute
/// zero rows.
pub fn spectral_gap(g: &UndirectedGraph) -> Result<f64, MetricsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricsError::TooSmall { need: 2, have: n });
    }
    if g.components().len() > 1 {
        return Ok(0.0);
    }
    if n <= DENSE_LIMIT {
        let l = normalized_laplacian(g);
        let mut eigenvalues: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(eigenvalues[1].max(0.0))
    } else {
        Ok(deflated_power_gap(g))
    }
}

fn normalized_laplacian(g: &UndirectedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.degree(v);
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64).sqrt()
            }
        })
        .collect();
    let mut l = DMatrix::zeros(n, n);
    for v in 0..n {
        if g.degree(v) > 0 {
            l[(v, v)] = 1.0;
        }
        for &w in g.neighbors(v) {
            l[(v, w as usize)] = -inv_sqrt_deg[v] * inv_sqrt_deg[w as usize];
        }
    }
    l
}

/// Largest eigenvalue of `2I - L` on the complement of the trivial
/// eigenvector `D^{1/2} 1`, via power iteration with deflation. Connected
/// input assumed.
fn deflated_power_gap(g: &UndirectedGraph) -> f64 {
    let n = g.node_count();
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|v| 1.0 / (g.degree(v).max(1) as f64).sqrt())
        .collect();
    let mut trivial: Vec<f64> = (0..n).map(|v| (g.degree(v) as f64).sqrt()).collect();
    let norm = trivial.iter().map(|x| x * x).sum::<f64>().sqrt();
    trivial.iter_mut().for_each(|x| *x /= norm);

    let mut x: Vec<f64> = (0..n)
        .map(|v| ((v * 2654435761) % 1000) as f64 / 1000.0 - 0.5)
        .collect();
    project_out(&mut x, &trivial);
    normalize(&mut x);

    let mut lambda_b = 0.0f64;
    let mut y = vec![0.0f64; n];
    for _ in 0..200_000 {
        // y = (2I - L) x = x + D^{-1/2} A D^{-1/2} x
        for v in 0..n {
            let mut acc = 0.0;
            for &w in g.neighbors(v) {
                acc += inv_sqrt_deg[v] * inv_sqrt_deg[w as usize] * x[w as usize];
            }
            y[v] = x[v] + acc;
        }
        project_out(&mut y, &trivial);
        let next = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        normalize(&mut y);
        std::mem::swap(&mut x, &mut y);
        if (next - lambda_b).abs() < 1e-12 {
            lambda_b = next;
            break;
        }
        lambda_b = next;
    }
    (2.0 - lambda_b).max(0.0)
}

fn project_out(x: &mut [f64], dir: &[f64]) {
    let dot = x.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>();
    for (xi, di) in x.iter_mut().zip(dir) {
        *xi -= dot * di;
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
