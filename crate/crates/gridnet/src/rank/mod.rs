//! Constrained ranking optimization and severity classification.
//!
//! The optimized ranking `T` minimizes, over permutations of `0..k`,
//!
//! ```text
//!   sum_v [ a*(T(v)-B(v))^2 + b*(T(v)-X(v))^2 + c*(T(v)-C(v))^2 ] / (2k^2)
//!        + alpha * sum_v (T(v)-S(v))^2
//! ```
//!
//! where `B`, `X`, `C` are the betweenness/eigenvector/closeness rank
//! vectors, `S` the simulation ranking, and `alpha` the agreement penalty.
//! Centrality mismatch is measured on the normalized rank scale (half mean
//! squared deviation), the penalty on raw ranks, so the alpha thresholds stay
//! comparable across case sizes. The minimization is an exact linear
//! assignment; weights live on a 0.01 grid and alpha on a 1e-6 grid, making
//! costs exact integers and tie-breaks exact.

mod assignment;
mod severity;

pub use severity::{classify_severity, SeverityClass, SeverityInput, SeverityRecord, SeverityWeights};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::RankVector;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("rank vectors disagree: {0}")]
    MismatchedInputs(String),
    #[error("missing utility {0}")]
    MissingUtility(String),
    #[error("alpha sweep did not converge within {0} grid points")]
    NoConvergence(usize),
    #[error("severity classification needs at least 6 utilities, got {0}")]
    TooFewUtilities(usize),
}

/// The four rank vectors the optimization consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankingInputs {
    pub sim: RankVector,
    pub betweenness: RankVector,
    pub eigenvector: RankVector,
    pub closeness: RankVector,
}

impl RankingInputs {
    pub fn new(
        sim: RankVector,
        betweenness: RankVector,
        eigenvector: RankVector,
        closeness: RankVector,
    ) -> Result<Self, RankError> {
        let keys: Vec<&String> = sim.keys().collect();
        for other in [&betweenness, &eigenvector, &closeness] {
            if other.len() != sim.len() || !keys.iter().all(|k| other.rank_of(k).is_some()) {
                return Err(RankError::MismatchedInputs(
                    "rank vectors must cover the same node set".to_string(),
                ));
            }
        }
        Ok(RankingInputs { sim, betweenness, eigenvector, closeness })
    }

    pub fn k(&self) -> usize {
        self.sim.len()
    }

    /// Nodes in id order; row order of the cost matrix.
    pub fn nodes(&self) -> Vec<String> {
        self.sim.keys().cloned().collect()
    }
}

/// Objective weights on the three centrality references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Weights {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, RankError> {
        let w = Weights { a, b, c };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), RankError> {
        let (a, b, c) = (self.a, self.b, self.c);
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(RankError::InvalidWeights("weights must be positive".into()));
        }
        if (a + b + c - 1.0).abs() > 1e-9 {
            return Err(RankError::InvalidWeights("weights must sum to 1".into()));
        }
        if !(c <= b && b <= a) {
            return Err(RankError::InvalidWeights("need c <= b <= a".into()));
        }
        self.grid_units()?;
        Ok(())
    }

    /// Weights as integers on the 0.01 grid.
    fn grid_units(&self) -> Result<(i128, i128, i128), RankError> {
        let to_units = |x: f64| -> Result<i128, RankError> {
            let u = (x * 100.0).round();
            if (x * 100.0 - u).abs() > 1e-6 {
                return Err(RankError::InvalidWeights(format!(
                    "weight {x} is not on the 0.01 grid"
                )));
            }
            Ok(u as i128)
        };
        Ok((to_units(self.a)?, to_units(self.b)?, to_units(self.c)?))
    }
}

impl Default for Weights {
    /// The weights the sweep settles on for these networks.
    fn default() -> Self {
        Weights { a: 0.97, b: 0.02, c: 0.01 }
    }
}

const ALPHA_DENOM: f64 = 1e6;

fn alpha_units(alpha: f64) -> Result<i128, RankError> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(RankError::InvalidWeights("alpha must be nonnegative".into()));
    }
    let u = (alpha * ALPHA_DENOM).round();
    if (alpha * ALPHA_DENOM - u).abs() > 1e-3 {
        return Err(RankError::InvalidWeights(format!(
            "alpha {alpha} is not on the 1e-6 grid"
        )));
    }
    Ok(u as i128)
}

/// Exact integer cost of assigning rank `r` to node `v`, scaled by
/// `2 k^2 * 100 * 1e6`. Shared by the solver and the exhaustive test oracle.
pub fn cost_matrix(
    inputs: &RankingInputs,
    w: &Weights,
    alpha: f64,
) -> Result<Vec<Vec<i128>>, RankError> {
    let (wa, wb, wc) = w.grid_units()?;
    let au = alpha_units(alpha)?;
    let k = inputs.k() as i128;
    let nodes = inputs.nodes();
    let mut cost = vec![vec![0i128; k as usize]; k as usize];
    for (row, node) in nodes.iter().enumerate() {
        let b = inputs.betweenness.rank_of(node).unwrap() as i128;
        let x = inputs.eigenvector.rank_of(node).unwrap() as i128;
        let c = inputs.closeness.rank_of(node).unwrap() as i128;
        let s = inputs.sim.rank_of(node).unwrap() as i128;
        for r in 0..k {
            let db = (r - b) * (r - b);
            let dx = (r - x) * (r - x);
            let dc = (r - c) * (r - c);
            let ds = (r - s) * (r - s);
            cost[row][r as usize] =
                (wa * db + wb * dx + wc * dc) * 1_000_000 + au * 200 * k * k * ds;
        }
    }
    Ok(cost)
}

/// Solves the ranking optimization exactly; optimal ties resolve to the
/// lexicographically smallest `T` in node-id order.
pub fn solve_t(inputs: &RankingInputs, w: &Weights, alpha: f64) -> Result<RankVector, RankError> {
    let cost = cost_matrix(inputs, w, alpha)?;
    let (assignment, _) = assignment::solve_assignment_lexicographic(&cost);
    let nodes = inputs.nodes();
    let ranks: BTreeMap<String, u32> = nodes
        .into_iter()
        .zip(assignment.into_iter().map(|r| r as u32))
        .collect();
    Ok(RankVector::new(ranks).expect("assignment is a permutation"))
}

/// Largest per-node rank deviation between `t` and the simulation ranking.
pub fn max_deviation(t: &RankVector, s: &RankVector) -> u32 {
    t.as_map()
        .iter()
        .map(|(node, &r)| {
            let sr = s.rank_of(node).expect("same node set");
            r.abs_diff(sr)
        })
        .max()
        .unwrap_or(0)
}

/// Grid search over the weight simplex (`step 0.01`, each weight at least
/// 0.01, `c <= b <= a`) minimizing the objective at `alpha = 0`, re-solving
/// `T` per grid point. Ties prefer the more concentrated weights (larger `a`,
/// then larger `b`).
pub fn optimize_weights(inputs: &RankingInputs) -> (Weights, RankVector) {
    let mut best: Option<(i128, Weights, RankVector)> = None;
    let mut a_units = 98;
    while a_units >= 34 {
        let mut b_units = (100 - a_units).min(a_units);
        while b_units >= 1 {
            let c_units = 100 - a_units - b_units;
            if c_units < 1 || c_units > b_units {
                b_units -= 1;
                continue;
            }
            let w = Weights {
                a: a_units as f64 / 100.0,
                b: b_units as f64 / 100.0,
                c: c_units as f64 / 100.0,
            };
            let cost = cost_matrix(inputs, &w, 0.0).expect("grid weights are valid");
            let (assignment, total) = assignment::solve_assignment_lexicographic(&cost);
            if best.as_ref().map_or(true, |(bt, _, _)| total < *bt) {
                let nodes = inputs.nodes();
                let ranks: BTreeMap<String, u32> = nodes
                    .into_iter()
                    .zip(assignment.into_iter().map(|r| r as u32))
                    .collect();
                best = Some((total, w, RankVector::new(ranks).unwrap()));
            }
            b_units -= 1;
        }
        a_units -= 1;
    }
    let (_, w, t) = best.expect("simplex grid is nonempty");
    (w, t)
}

/// The two penalty thresholds of an alpha sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPair {
    /// Smallest grid alpha at which `T` equals the simulation ranking.
    pub alpha0: f64,
    /// Smallest grid alpha at which every rank deviates by at most one.
    pub alpha1: f64,
}

/// Maximum grid points explored before giving up.
const ALPHA_MAX_STEPS: usize = 1000;

/// Sweeps `alpha` over `{0, step, 2*step, ...}` and reports the first grid
/// points satisfying exact agreement and within-one agreement.
pub fn alpha_sweep(
    inputs: &RankingInputs,
    w: &Weights,
    grid_step: f64,
) -> Result<AlphaPair, RankError> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(RankError::InvalidWeights("grid step must be positive".into()));
    }
    let mut alpha0 = None;
    let mut alpha1 = None;
    for i in 0..=ALPHA_MAX_STEPS {
        let alpha = grid_step * i as f64;
        let t = solve_t(inputs, w, alpha)?;
        let dev = max_deviation(&t, &inputs.sim);
        if alpha1.is_none() && dev <= 1 {
            alpha1 = Some(alpha);
        }
        if dev == 0 {
            alpha0 = Some(alpha);
            break;
        }
    }
    match (alpha0, alpha1) {
        (Some(a0), Some(a1)) => Ok(AlphaPair { alpha0: a0, alpha1: a1 }),
        _ => Err(RankError::NoConvergence(ALPHA_MAX_STEPS)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    pub(crate) fn rv(pairs: &[(&str, u32)]) -> RankVector {
        let map: BTreeMap<String, u32> =
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        RankVector::new(map).unwrap()
    }

    fn star_500_inputs() -> RankingInputs {
        // normal-condition star ranks of the 500-bus case
        let sim = rv(&[("u0", 1), ("u1", 0), ("u2", 3), ("u3", 2)]);
        let refs = rv(&[("u0", 0), ("u1", 2), ("u2", 3), ("u3", 1)]);
        RankingInputs::new(sim, refs.clone(), refs.clone(), refs).unwrap()
    }

    #[test]
    fn huge_alpha_pins_t_to_sim() {
        let inputs = star_500_inputs();
        let t = solve_t(&inputs, &Weights::default(), 1e6).unwrap();
        assert_eq!(t, inputs.sim);
    }

    #[test]
    fn zero_alpha_with_agreeing_references_returns_them() {
        let refs = rv(&[("u0", 2), ("u1", 0), ("u2", 1)]);
        let sim = rv(&[("u0", 0), ("u1", 1), ("u2", 2)]);
        let inputs = RankingInputs::new(sim, refs.clone(), refs.clone(), refs.clone()).unwrap();
        let t = solve_t(&inputs, &Weights::default(), 0.0).unwrap();
        assert_eq!(t, refs);
    }

    #[test]
    fn default_weights_are_the_reference_passthrough() {
        let w = Weights::default();
        assert_eq!((w.a, w.b, w.c), (0.97, 0.02, 0.01));
        assert!(w.validate().is_ok());
    }

    #[test]
    fn weights_constraints_enforced() {
        assert!(Weights::new(0.5, 0.3, 0.2).is_ok());
        assert!(Weights::new(0.2, 0.3, 0.5).is_err()); // violates c <= b <= a
        assert!(Weights::new(0.5, 0.5, 0.1).is_err()); // sums over 1
        assert!(Weights::new(0.98, 0.015, 0.005).is_err()); // off the grid
    }

    #[test]
    fn alpha_sweep_star_500_hits_tenth() {
        let inputs = star_500_inputs();
        let pair = alpha_sweep(&inputs, &Weights::default(), 0.05).unwrap();
        assert_eq!(pair.alpha0, 0.1);
        assert!(pair.alpha1 <= pair.alpha0);
    }

    #[test]
    fn alpha_sweep_radial_500() {
        let sim = rv(&[("u0", 0), ("u1", 1), ("u2", 3), ("u3", 2)]);
        let refs = rv(&[("u0", 0), ("u1", 2), ("u2", 3), ("u3", 1)]);
        let inputs = RankingInputs::new(sim, refs.clone(), refs.clone(), refs).unwrap();
        let pair = alpha_sweep(&inputs, &Weights::default(), 0.05).unwrap();
        // references already sit within one rank of the simulation
        assert_eq!(pair.alpha1, 0.0);
    }

    #[test]
    fn alpha_sweep_trivial_when_aligned() {
        let refs = rv(&[("u0", 0), ("u1", 1), ("u2", 2)]);
        let inputs =
            RankingInputs::new(refs.clone(), refs.clone(), refs.clone(), refs.clone()).unwrap();
        let pair = alpha_sweep(&inputs, &Weights::default(), 0.05).unwrap();
        assert_eq!(pair.alpha0, 0.0);
        assert_eq!(pair.alpha1, 0.0);
    }

    #[test]
    fn optimize_weights_constraint_always_holds() {
        let refs = rv(&[("u0", 0), ("u1", 1), ("u2", 2), ("u3", 3)]);
        let inputs =
            RankingInputs::new(refs.clone(), refs.clone(), refs.clone(), refs.clone()).unwrap();
        let (w, _) = optimize_weights(&inputs);
        assert!(w.c <= w.b && w.b <= w.a);
    }

    #[test]
    fn optimize_weights_concentrates_on_matching_reference() {
        // betweenness alone matches the simulation ranking
        let sim = rv(&[("u0", 0), ("u1", 1), ("u2", 2), ("u3", 3)]);
        let cb = sim.clone();
        let x = rv(&[("u0", 3), ("u1", 2), ("u2", 1), ("u3", 0)]);
        let cc = rv(&[("u0", 1), ("u1", 0), ("u2", 3), ("u3", 2)]);
        let inputs = RankingInputs::new(sim, cb, x, cc).unwrap();
        let (w, _) = optimize_weights(&inputs);
        assert_eq!(w.a, 0.98);
    }
}
