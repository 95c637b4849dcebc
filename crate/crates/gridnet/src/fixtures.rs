//! Embedded reference tables: per-case utility rankings and per-utility
//! attack-sweep results, used for replay runs and validation.

use std::collections::BTreeMap;

use crate::cases::BuiltinCase;
use crate::metrics::RankVector;
use crate::rank::{RankingInputs, SeverityInput};
use crate::topology::TopologyKind;

const TABLE_RANKS: &str = include_str!("../data/table_ranks.csv");
const TABLE_DOS: &str = include_str!("../data/table_dos.csv");
pub const CASE_MANIFEST: &str = include_str!("../data/case_manifest.json");

/// Canonical utility id used across the built-in cases.
pub fn utility_id(index: u32) -> String {
    format!("utility-{index:02}")
}

fn kind_name(kind: TopologyKind) -> &'static str {
    match kind {
        TopologyKind::Star => "star",
        TopologyKind::Radial => "radial",
        TopologyKind::Hybrid => "hybrid",
    }
}

/// Reference ranking inputs (simulation + three centralities) for a case and
/// wiring kind.
pub fn rank_inputs(case: BuiltinCase, kind: TopologyKind) -> RankingInputs {
    let mut sim = BTreeMap::new();
    let mut cb = BTreeMap::new();
    let mut x = BTreeMap::new();
    let mut cc = BTreeMap::new();
    for line in TABLE_RANKS.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0] != case.name() || cols[1] != kind_name(kind) {
            continue;
        }
        let id = utility_id(cols[2].parse().expect("utility index"));
        sim.insert(id.clone(), cols[3].parse().expect("sim rank"));
        cb.insert(id.clone(), cols[4].parse().expect("betweenness rank"));
        x.insert(id.clone(), cols[5].parse().expect("eigenvector rank"));
        cc.insert(id, cols[6].parse().expect("closeness rank"));
    }
    RankingInputs::new(
        RankVector::new(sim).expect("fixture sim ranks form a permutation"),
        RankVector::new(cb).expect("fixture betweenness ranks form a permutation"),
        RankVector::new(x).expect("fixture eigenvector ranks form a permutation"),
        RankVector::new(cc).expect("fixture closeness ranks form a permutation"),
    )
    .expect("fixture rank vectors cover the same utilities")
}

/// One row of the attack-impact tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DosFixtureRow {
    /// `None` marks the no-attack baseline row.
    pub utility: Option<String>,
    pub alpha0: f64,
    pub alpha1: f64,
    pub substations_lost: Option<u64>,
    pub regulatory_affected: Option<String>,
    /// Published severity level, absent for cases too small to classify.
    pub class: Option<u8>,
}

/// Attack-sweep reference rows for a case and wiring kind.
pub fn dos_rows(case: BuiltinCase, kind: TopologyKind) -> Vec<DosFixtureRow> {
    let mut out = Vec::new();
    for line in TABLE_DOS.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0] != case.name() || cols[1] != kind_name(kind) {
            continue;
        }
        let utility = if cols[2] == "normal" {
            None
        } else {
            Some(utility_id(cols[2].parse().expect("utility index")))
        };
        out.push(DosFixtureRow {
            utility,
            alpha0: cols[3].parse().expect("alpha0"),
            alpha1: cols[4].parse().expect("alpha1"),
            substations_lost: if cols[5].is_empty() {
                None
            } else {
                Some(cols[5].parse().expect("substations lost"))
            },
            regulatory_affected: if cols[6].is_empty() {
                None
            } else {
                Some(format!("regulatory-{}", cols[6]))
            },
            class: if cols[7].is_empty() {
                None
            } else {
                Some(cols[7].parse().expect("class"))
            },
        });
    }
    out
}

/// Per-utility severity inputs from the fixture rows (baseline row dropped).
pub fn severity_inputs(case: BuiltinCase, kind: TopologyKind) -> Vec<SeverityInput> {
    dos_rows(case, kind)
        .into_iter()
        .filter_map(|r| {
            r.utility.map(|utility| SeverityInput {
                utility,
                alpha0: r.alpha0,
                alpha1: r.alpha1,
                substations_lost: r.substations_lost.unwrap_or(0),
                regulatory_affected: r.regulatory_affected,
            })
        })
        .collect()
}

/// Published severity level per utility.
pub fn published_classes(case: BuiltinCase, kind: TopologyKind) -> BTreeMap<String, u8> {
    dos_rows(case, kind)
        .into_iter()
        .filter_map(|r| match (r.utility, r.class) {
            (Some(u), Some(c)) => Some((u, c)),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_fixtures_parse_for_all_cases() {
        for case in [BuiltinCase::Act500, BuiltinCase::Act2000, BuiltinCase::Act10k] {
            for kind in [TopologyKind::Star, TopologyKind::Radial] {
                let inputs = rank_inputs(case, kind);
                let (_, _, utilities, _) = case.counts();
                assert_eq!(inputs.k(), utilities);
            }
        }
    }

    #[test]
    fn star_500_sim_ranks_match_reference() {
        let inputs = rank_inputs(BuiltinCase::Act500, TopologyKind::Star);
        assert_eq!(inputs.sim.rank_of("utility-00"), Some(1));
        assert_eq!(inputs.sim.rank_of("utility-01"), Some(0));
        assert_eq!(inputs.sim.rank_of("utility-02"), Some(3));
        assert_eq!(inputs.sim.rank_of("utility-03"), Some(2));
        assert_eq!(inputs.betweenness.rank_of("utility-00"), Some(0));
        assert_eq!(inputs.betweenness.rank_of("utility-01"), Some(2));
        assert_eq!(inputs.betweenness.rank_of("utility-02"), Some(3));
        assert_eq!(inputs.betweenness.rank_of("utility-03"), Some(1));
    }

    #[test]
    fn dos_fixture_counts_and_sums() {
        let star_2000 = severity_inputs(BuiltinCase::Act2000, TopologyKind::Star);
        assert_eq!(star_2000.len(), 20);
        assert_eq!(star_2000.iter().map(|r| r.substations_lost).sum::<u64>(), 1250);
        assert_eq!(
            star_2000.iter().find(|r| r.utility == "utility-08").unwrap().substations_lost,
            45
        );
        let star_10k = severity_inputs(BuiltinCase::Act10k, TopologyKind::Star);
        assert_eq!(star_10k.len(), 80);
        assert!(star_10k.iter().all(|r| r.regulatory_affected.is_some()));
        let star_500 = severity_inputs(BuiltinCase::Act500, TopologyKind::Star);
        assert_eq!(star_500.len(), 4);
        assert!(star_500.iter().all(|r| (r.alpha0 - 0.1).abs() < 1e-12));
    }

    #[test]
    fn published_classes_cover_large_cases_only() {
        assert!(published_classes(BuiltinCase::Act500, TopologyKind::Star).is_empty());
        assert_eq!(published_classes(BuiltinCase::Act2000, TopologyKind::Star).len(), 20);
        assert_eq!(published_classes(BuiltinCase::Act10k, TopologyKind::Radial).len(), 80);
    }

    #[test]
    fn baseline_rows_present() {
        let rows = dos_rows(BuiltinCase::Act2000, TopologyKind::Star);
        let normal: Vec<&DosFixtureRow> = rows.iter().filter(|r| r.utility.is_none()).collect();
        assert_eq!(normal.len(), 1);
        assert!((normal[0].alpha0 - 0.25).abs() < 1e-12);
    }
}
