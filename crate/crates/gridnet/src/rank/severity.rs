//! Six-level severity classification of per-utility attack impact.

use serde::{Deserialize, Serialize};

use super::RankError;

/// Impact levels, most severe first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeverityClass {
    Elevated = 1,
    Extreme = 2,
    High = 3,
    Critical = 4,
    Severe = 5,
    Catastrophic = 6,
}

impl SeverityClass {
    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Self> {
        match level {
            1 => Some(SeverityClass::Elevated),
            2 => Some(SeverityClass::Extreme),
            3 => Some(SeverityClass::High),
            4 => Some(SeverityClass::Critical),
            5 => Some(SeverityClass::Severe),
            6 => Some(SeverityClass::Catastrophic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeverityClass::Catastrophic => "Catastrophic",
            SeverityClass::Severe => "Severe",
            SeverityClass::Critical => "Critical",
            SeverityClass::High => "High",
            SeverityClass::Extreme => "Extreme",
            SeverityClass::Elevated => "Elevated",
        }
    }
}

/// Per-utility sweep results entering classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityInput {
    pub utility: String,
    pub alpha0: f64,
    pub alpha1: f64,
    pub substations_lost: u64,
    pub regulatory_affected: Option<String>,
}

/// A classified utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityRecord {
    pub utility: String,
    pub alpha0: f64,
    pub alpha1: f64,
    pub substations_lost: u64,
    pub regulatory_affected: Option<String>,
    pub severity: SeverityClass,
    /// Composite criticality score the class assignment was based on.
    pub score: f64,
}

/// Composite-score weights: alpha0 carries the most weight, then substations
/// lost, then alpha1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityWeights {
    pub alpha0: f64,
    pub substations: f64,
    pub alpha1: f64,
}

impl Default for SeverityWeights {
    fn default() -> Self {
        SeverityWeights { alpha0: 0.6, substations: 0.3, alpha1: 0.1 }
    }
}

fn min_max(values: &[f64]) -> impl Fn(f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    move |x| {
        if hi > lo {
            (x - lo) / (hi - lo)
        } else {
            0.0
        }
    }
}

/// Class sizes for a cohort of `k`: as equal as possible, remainders going to
/// the extreme classes first (Catastrophic, then Elevated, then inward).
fn class_sizes(k: usize) -> [usize; 6] {
    let base = k / 6;
    let rem = k % 6;
    let mut sizes = [base; 6];
    for &slot in [0usize, 5, 1, 4, 2, 3].iter().take(rem) {
        sizes[slot] += 1;
    }
    sizes
}

/// Scores each record with min-max normalized components, sorts descending,
/// and partitions into six contiguous classes. Ties in score resolve by
/// lowest utility id.
pub fn classify_severity(
    records: &[SeverityInput],
    weights: SeverityWeights,
) -> Result<Vec<SeverityRecord>, RankError> {
    if records.len() < 6 {
        return Err(RankError::TooFewUtilities(records.len()));
    }
    let a0: Vec<f64> = records.iter().map(|r| r.alpha0).collect();
    let a1: Vec<f64> = records.iter().map(|r| r.alpha1).collect();
    let lost: Vec<f64> = records.iter().map(|r| r.substations_lost as f64).collect();
    let (za0, za1, zlost) = (min_max(&a0), min_max(&a1), min_max(&lost));

    let mut scored: Vec<(f64, &SeverityInput)> = records
        .iter()
        .map(|r| {
            let score = weights.alpha0 * za0(r.alpha0)
                + weights.substations * zlost(r.substations_lost as f64)
                + weights.alpha1 * za1(r.alpha1);
            (score, r)
        })
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.utility.cmp(&y.1.utility)));

    let sizes = class_sizes(records.len());
    let mut out = Vec::with_capacity(records.len());
    let mut pos = 0usize;
    for (ci, &size) in sizes.iter().enumerate() {
        let class = SeverityClass::from_level(6 - ci as u8).expect("levels 1..=6");
        for _ in 0..size {
            let (score, r) = &scored[pos];
            out.push(SeverityRecord {
                utility: r.utility.clone(),
                alpha0: r.alpha0,
                alpha1: r.alpha1,
                substations_lost: r.substations_lost,
                regulatory_affected: r.regulatory_affected.clone(),
                severity: class,
                score: *score,
            });
            pos += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(utility: &str, alpha0: f64, alpha1: f64, lost: u64) -> SeverityInput {
        SeverityInput {
            utility: utility.to_string(),
            alpha0,
            alpha1,
            substations_lost: lost,
            regulatory_affected: None,
        }
    }

    #[test]
    fn twenty_records_split_4_3_3_3_3_4() {
        assert_eq!(class_sizes(20), [4, 3, 3, 3, 3, 4]);
        assert_eq!(class_sizes(80), [14, 13, 13, 13, 13, 14]);
        assert_eq!(class_sizes(12), [2, 2, 2, 2, 2, 2]);
        assert_eq!(class_sizes(9), [2, 2, 1, 1, 1, 2]);
    }

    #[test]
    fn too_few_records_error() {
        let recs: Vec<SeverityInput> = (0..5).map(|i| input(&format!("u{i}"), 0.1, 0.1, 5)).collect();
        assert!(matches!(
            classify_severity(&recs, SeverityWeights::default()),
            Err(RankError::TooFewUtilities(5))
        ));
    }

    #[test]
    fn identical_records_tie_by_id_order() {
        let recs: Vec<SeverityInput> =
            (0..6).map(|i| input(&format!("u{i}"), 0.4, 0.2, 10)).collect();
        let out = classify_severity(&recs, SeverityWeights::default()).unwrap();
        let order: Vec<&str> = out.iter().map(|r| r.utility.as_str()).collect();
        assert_eq!(order, ["u0", "u1", "u2", "u3", "u4", "u5"]);
        assert_eq!(out[0].severity, SeverityClass::Catastrophic);
        assert_eq!(out[5].severity, SeverityClass::Elevated);
    }

    #[test]
    fn class_labels_nonincreasing_down_sorted_list() {
        let recs: Vec<SeverityInput> = (0..13)
            .map(|i| input(&format!("u{i:02}"), 1.0 - 0.05 * i as f64, 0.2, 100 - i))
            .collect();
        let out = classify_severity(&recs, SeverityWeights::default()).unwrap();
        for w in out.windows(2) {
            assert!(w[0].severity >= w[1].severity);
            assert!(w[0].score >= w[1].score);
        }
        // all six labels appear for 13 records
        let mut seen: Vec<u8> = out.iter().map(|r| r.severity.level()).collect();
        seen.dedup();
        assert_eq!(seen, vec![6, 5, 4, 3, 2, 1]);
    }
}
