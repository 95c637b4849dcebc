//! Orchestration: normal runs, single-target attack runs, the full
//! one-utility-at-a-time attack sweep, and hybrid topology derivation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cases::{synth_case, BuiltinCase};
use crate::fixtures;
use crate::metrics::{
    betweenness, closeness, eigenvector_centrality, rank_from_scores, CentralityTable,
    MetricsError, RankVector, UndirectedGraph,
};
use crate::rank::{
    alpha_sweep, classify_severity, AlphaPair, RankError, RankingInputs, SeverityClass,
    SeverityInput, SeverityWeights, Weights,
};
use crate::sim::{average_delay, run_simulation, NodeOverrides, SimError, SimParams, SimStats};
use crate::topology::{
    build_hybrid, build_radial, build_star, element_id, load_topology, ElementKind, Entity, Role,
    Topology, TopologyError, TopologyKind,
};

/// Forwarding probability of a router under attack.
pub const DOS_FORWARD_PROB: f64 = 0.01;

/// Default sweep horizon in simulated seconds. Rank stability, not absolute
/// delay, drives the pipeline, so sweeps run shorter than the headline runs.
pub const SWEEP_HORIZON: f64 = 200.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error("{0} is not a utility router")]
    NotAUtility(String),
    #[error("utility {0} has no delay entry")]
    MissingUtility(String),
    #[error("{0}")]
    Unsupported(String),
}

/// Which case to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CaseRef {
    Builtin(String),
    File { path: PathBuf, case_name: String },
}

impl CaseRef {
    pub fn parse(s: &str) -> CaseRef {
        if BuiltinCase::parse(s).is_some() {
            CaseRef::Builtin(s.to_string())
        } else {
            // `path#case` selects a case inside a file; defaults to the stem
            match s.split_once('#') {
                Some((path, case)) => CaseRef::File {
                    path: PathBuf::from(path),
                    case_name: case.to_string(),
                },
                None => {
                    let path = PathBuf::from(s);
                    let case_name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    CaseRef::File { path, case_name }
                }
            }
        }
    }

    pub fn builtin(&self) -> Option<BuiltinCase> {
        match self {
            CaseRef::Builtin(name) => BuiltinCase::parse(name),
            CaseRef::File { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            CaseRef::Builtin(name) => BuiltinCase::parse(name)
                .map(|c| c.name().to_string())
                .unwrap_or_else(|| name.clone()),
            CaseRef::File { case_name, .. } => case_name.clone(),
        }
    }

    pub fn entities(&self) -> Result<Vec<Entity>, ScenarioError> {
        match self {
            CaseRef::Builtin(name) => {
                let case = BuiltinCase::parse(name).ok_or_else(|| {
                    ScenarioError::Unsupported(format!("unknown built-in case {name}"))
                })?;
                Ok(synth_case(case))
            }
            CaseRef::File { path, case_name } => Ok(load_topology(path, case_name)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Normal,
    Dos { target: String },
}

/// One scenario to execute.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub case: CaseRef,
    pub kind: TopologyKind,
    pub mode: Mode,
    pub params: SimParams,
    pub until: f64,
}

/// Results of one scenario run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub stats: SimStats,
    pub sim_rank: RankVector,
    pub centrality: CentralityTable,
    pub alpha: Option<AlphaPair>,
    pub substations_lost: Option<u64>,
    pub regulatory_affected: Option<String>,
}

/// One utility's sweep outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub utility: String,
    pub alpha0: f64,
    pub alpha1: f64,
    pub substations_lost: u64,
    pub regulatory_affected: Option<String>,
    pub severity: Option<SeverityClass>,
    pub score: Option<f64>,
}

/// Sweep outcome for a whole case and wiring kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeverityReport {
    pub case_name: String,
    pub kind: TopologyKind,
    /// Alpha thresholds of the no-attack baseline.
    pub normal_alpha: Option<AlphaPair>,
    /// Records in descending criticality order when classified, utility order
    /// otherwise.
    pub records: Vec<SweepRecord>,
    pub classified: bool,
}

impl SeverityReport {
    /// Severity level per utility; only meaningful when classified.
    pub fn severity_map(&self) -> BTreeMap<String, u8> {
        self.records
            .iter()
            .filter_map(|r| r.severity.map(|s| (r.utility.clone(), s.level())))
            .collect()
    }
}

/// Eq.-style hybrid decision for one utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridDecision {
    pub utility: String,
    pub severity_star: u8,
    pub severity_radial: u8,
    pub choice: TopologyKind,
}

/// Builds the requested wiring for a case. Hybrid wiring needs classified
/// severity reports for both base kinds.
pub fn build_kind(
    entities: &[Entity],
    kind: TopologyKind,
    hybrid_inputs: Option<(&SeverityReport, &SeverityReport)>,
) -> Result<Topology, ScenarioError> {
    match kind {
        TopologyKind::Star => Ok(build_star(entities)?),
        TopologyKind::Radial => Ok(build_radial(entities)?),
        TopologyKind::Hybrid => {
            let (star, radial) = hybrid_inputs.ok_or_else(|| {
                ScenarioError::Unsupported(
                    "hybrid wiring needs star and radial severity reports".to_string(),
                )
            })?;
            Ok(derive_hybrid(entities, star, radial)?.0)
        }
    }
}

/// Ranks utilities by average router delay, largest first.
pub fn simulation_rank(
    stats: &SimStats,
    utilities: &[String],
) -> Result<RankVector, ScenarioError> {
    let mut scores = BTreeMap::new();
    for u in utilities {
        let router = element_id(ElementKind::Router, u);
        let delay = average_delay(stats, &router)
            .map_err(|_| ScenarioError::MissingUtility(u.clone()))?;
        scores.insert(u.clone(), delay);
    }
    let restrict: BTreeSet<String> = utilities.iter().cloned().collect();
    Ok(rank_from_scores(&scores, &restrict)?)
}

/// Rank vectors of the three centralities over the given utilities.
fn centrality_rank_inputs(
    graph: &UndirectedGraph,
    sim: RankVector,
    utilities: &[String],
) -> Result<RankingInputs, ScenarioError> {
    let restrict: BTreeSet<String> = utilities.iter().cloned().collect();
    let cb = rank_from_scores(&betweenness(graph), &restrict)?;
    let x = rank_from_scores(&eigenvector_centrality(graph)?, &restrict)?;
    let cc = rank_from_scores(&closeness(graph)?, &restrict)?;
    Ok(RankingInputs::new(sim, cb, x, cc)?)
}

/// Normal-condition run: simulate, score the full router graph, rank
/// utilities by delay.
pub fn run_normal(spec: &ScenarioSpec) -> Result<ScenarioReport, ScenarioError> {
    let entities = spec.case.entities()?;
    let topo = build_kind(&entities, spec.kind, None)?;
    run_normal_on(&topo, spec)
}

/// Normal-condition run on an already-built topology.
pub fn run_normal_on(topo: &Topology, spec: &ScenarioSpec) -> Result<ScenarioReport, ScenarioError> {
    let stats = run_simulation(topo, &spec.params, spec.until)?;
    let graph = UndirectedGraph::from_topology(topo);
    let centrality = CentralityTable::compute(&graph)?;
    let utilities = topo.utilities();
    let sim_rank = simulation_rank(&stats, &utilities)?;
    Ok(ScenarioReport {
        stats,
        sim_rank,
        centrality,
        alpha: None,
        substations_lost: None,
        regulatory_affected: None,
    })
}

/// Overrides putting one utility router under attack.
pub fn dos_params(params: &SimParams, target: &str) -> SimParams {
    let mut p = params.clone();
    p.node_overrides
        .entry(element_id(ElementKind::Router, target))
        .or_insert_with(NodeOverrides::default)
        .forward_prob = Some(DOS_FORWARD_PROB);
    p
}

/// Substations directly wired into the utility's router.
pub fn direct_substations(topo: &Topology, utility: &str) -> u64 {
    let router = element_id(ElementKind::Router, utility);
    let Some(target) = topo.node_index(&router) else { return 0 };
    let mut count = 0u64;
    for (i, n) in topo.nodes().iter().enumerate() {
        if n.kind == ElementKind::Router
            && n.role.is_substation()
            && topo.out(i as u32).contains(&target)
        {
            count += 1;
        }
    }
    count
}

fn check_is_utility(topo: &Topology, target: &str) -> Result<(), ScenarioError> {
    let router = element_id(ElementKind::Router, target);
    match topo.node_index(&router) {
        Some(idx) if topo.node(idx).role == Role::Utility => Ok(()),
        _ => Err(ScenarioError::NotAUtility(target.to_string())),
    }
}

fn multi_regulatory(topo: &Topology) -> bool {
    let regs: BTreeSet<&String> = topo.regulatory_of().values().collect();
    regs.len() > 1
}

/// Default alpha grid step for a cohort of `k` utilities.
pub fn default_grid_step(k: usize) -> f64 {
    if k >= 50 {
        0.5
    } else {
        0.05
    }
}

struct DosOutcome {
    stats: SimStats,
    inputs: RankingInputs,
    substations_lost: u64,
    regulatory_affected: Option<String>,
}

/// Attack one utility: simulate with its forwarding degraded, then recompute
/// centralities and delay ranks on the graph with the router removed,
/// re-ranking the survivors.
fn dos_outcome(
    topo: &Topology,
    params: &SimParams,
    until: f64,
    target: &str,
) -> Result<DosOutcome, ScenarioError> {
    check_is_utility(topo, target)?;
    let attacked = dos_params(params, target);
    let stats = run_simulation(topo, &attacked, until)?;

    let reduced = topo.remove_node(&element_id(ElementKind::Router, target))?;
    let graph = UndirectedGraph::from_topology(&reduced);
    let survivors: Vec<String> = topo
        .utilities()
        .into_iter()
        .filter(|u| u != target)
        .collect();
    let sim = simulation_rank(&stats, &survivors)?;
    let inputs = centrality_rank_inputs(&graph, sim, &survivors)?;

    let regulatory_affected = if multi_regulatory(topo) {
        topo.regulatory_of().get(target).cloned()
    } else {
        None
    };
    Ok(DosOutcome {
        stats,
        inputs,
        substations_lost: direct_substations(topo, target),
        regulatory_affected,
    })
}

/// Single-target attack run with full reporting.
pub fn run_dos(spec: &ScenarioSpec) -> Result<ScenarioReport, ScenarioError> {
    let Mode::Dos { target } = &spec.mode else {
        return Err(ScenarioError::Unsupported("spec mode is not an attack".to_string()));
    };
    let entities = spec.case.entities()?;
    let topo = build_kind(&entities, spec.kind, None)?;
    run_dos_on(&topo, spec, target)
}

/// Single-target attack run on an already-built topology.
pub fn run_dos_on(
    topo: &Topology,
    spec: &ScenarioSpec,
    target: &str,
) -> Result<ScenarioReport, ScenarioError> {
    let outcome = dos_outcome(topo, &spec.params, spec.until, target)?;
    let reduced = topo.remove_node(&element_id(ElementKind::Router, target))?;
    let graph = UndirectedGraph::from_topology(&reduced);
    let centrality = CentralityTable::compute(&graph)?;
    let k = outcome.inputs.k();
    let alpha = alpha_sweep(&outcome.inputs, &Weights::default(), default_grid_step(k))?;
    Ok(ScenarioReport {
        stats: outcome.stats,
        sim_rank: outcome.inputs.sim.clone(),
        centrality,
        alpha: Some(alpha),
        substations_lost: Some(outcome.substations_lost),
        regulatory_affected: outcome.regulatory_affected,
    })
}

/// Downstream delivery ratio of a utility: packets its collection sink
/// absorbed over packets its substations generated. The utility's sink only
/// ever receives traffic forwarded by the utility's own router, so for an
/// unattacked utility the ratio is untouched by attacks elsewhere.
pub fn delivery_ratio(stats: &SimStats, topo: &Topology, utility: &str) -> f64 {
    let mut generated = 0u64;
    for (sub, u) in topo.utility_of() {
        if u == utility {
            generated += stats.generated_by_entity.get(sub).copied().unwrap_or(0);
        }
    }
    let sink = element_id(ElementKind::Sink, utility);
    let delivered = stats.sinks.get(&sink).map(|s| s.received).unwrap_or(0);
    if generated == 0 {
        0.0
    } else {
        delivered as f64 / generated as f64
    }
}

/// Options for [`dos_sweep`].
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub until: f64,
    pub grid_step: Option<f64>,
    pub workers: usize,
    pub severity_weights: SeverityWeights,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            until: SWEEP_HORIZON,
            grid_step: None,
            workers: 2,
            severity_weights: SeverityWeights::default(),
        }
    }
}

/// Attacks every utility in turn, sweeps alpha on each reduced network, and
/// classifies the cohort (six or more utilities required for classes).
pub fn dos_sweep(
    topo: &Topology,
    case_name: &str,
    params: &SimParams,
    cfg: &SweepConfig,
) -> Result<SeverityReport, ScenarioError> {
    let utilities = topo.utilities();
    let k = utilities.len();
    let step = cfg.grid_step.unwrap_or_else(|| default_grid_step(k.saturating_sub(1)));

    // baseline alpha thresholds from the unattacked network
    let normal_stats = run_simulation(topo, params, cfg.until)?;
    let graph = UndirectedGraph::from_topology(topo);
    let normal_sim = simulation_rank(&normal_stats, &utilities)?;
    let normal_inputs = centrality_rank_inputs(&graph, normal_sim, &utilities)?;
    let normal_alpha = alpha_sweep(&normal_inputs, &Weights::default(), step)?;

    let slots: Mutex<Vec<Option<Result<SeverityInput, ScenarioError>>>> =
        Mutex::new((0..k).map(|_| None).collect());
    let workers = cfg.workers.clamp(1, k.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= k {
                    break;
                }
                let target = &utilities[i];
                let result = dos_outcome(topo, params, cfg.until, target).and_then(|outcome| {
                    let pair = alpha_sweep(&outcome.inputs, &Weights::default(), step)?;
                    Ok(SeverityInput {
                        utility: target.clone(),
                        alpha0: pair.alpha0,
                        alpha1: pair.alpha1,
                        substations_lost: outcome.substations_lost,
                        regulatory_affected: outcome.regulatory_affected,
                    })
                });
                slots.lock().expect("sweep worker poisoned")[i] = Some(result);
            });
        }
    });

    let collected = slots.into_inner().expect("sweep slots");
    let mut inputs = Vec::with_capacity(k);
    for slot in collected {
        inputs.push(slot.expect("every target processed")?);
    }
    Ok(assemble_report(case_name, topo.kind, Some(normal_alpha), inputs, cfg.severity_weights))
}

fn assemble_report(
    case_name: &str,
    kind: TopologyKind,
    normal_alpha: Option<AlphaPair>,
    inputs: Vec<SeverityInput>,
    weights: SeverityWeights,
) -> SeverityReport {
    if inputs.len() >= 6 {
        let classified = classify_severity(&inputs, weights).expect("cohort size checked");
        let records = classified
            .into_iter()
            .map(|r| SweepRecord {
                utility: r.utility,
                alpha0: r.alpha0,
                alpha1: r.alpha1,
                substations_lost: r.substations_lost,
                regulatory_affected: r.regulatory_affected,
                severity: Some(r.severity),
                score: Some(r.score),
            })
            .collect();
        SeverityReport {
            case_name: case_name.to_string(),
            kind,
            normal_alpha,
            records,
            classified: true,
        }
    } else {
        let records = inputs
            .into_iter()
            .map(|r| SweepRecord {
                utility: r.utility,
                alpha0: r.alpha0,
                alpha1: r.alpha1,
                substations_lost: r.substations_lost,
                regulatory_affected: r.regulatory_affected,
                severity: None,
                score: None,
            })
            .collect();
        SeverityReport {
            case_name: case_name.to_string(),
            kind,
            normal_alpha,
            records,
            classified: false,
        }
    }
}

/// Replays the published sweep tables through classification, skipping the
/// simulation stage.
pub fn severity_report_from_fixtures(
    case: BuiltinCase,
    kind: TopologyKind,
) -> Result<SeverityReport, ScenarioError> {
    let inputs = fixtures::severity_inputs(case, kind);
    let normal = fixtures::dos_rows(case, kind)
        .into_iter()
        .find(|r| r.utility.is_none())
        .map(|r| AlphaPair { alpha0: r.alpha0, alpha1: r.alpha1 });
    Ok(assemble_report(
        case.name(),
        kind,
        normal,
        inputs,
        SeverityWeights::default(),
    ))
}

/// Applies the severity comparison to every utility and wires the hybrid
/// topology accordingly.
pub fn derive_hybrid(
    entities: &[Entity],
    star_report: &SeverityReport,
    radial_report: &SeverityReport,
) -> Result<(Topology, Vec<HybridDecision>), ScenarioError> {
    let star = star_report.severity_map();
    let radial = radial_report.severity_map();
    let topo = build_hybrid(entities, &star, &radial)?;
    let mut decisions = Vec::new();
    for u in topo.utilities() {
        let r_s = star[&u];
        let r_r = radial[&u];
        decisions.push(HybridDecision {
            utility: u.clone(),
            severity_star: r_s,
            severity_radial: r_r,
            choice: crate::topology::hybrid_choice(r_s, r_r),
        });
    }
    Ok((topo, decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{LoadModel, SizeModel};

    fn cell_spec(mode: Mode) -> ScenarioSpec {
        ScenarioSpec {
            case: CaseRef::Builtin("500".into()),
            kind: TopologyKind::Star,
            mode,
            params: SimParams::default(),
            until: 5.0,
        }
    }

    #[test]
    fn run_normal_produces_full_rank() {
        let report = run_normal(&cell_spec(Mode::Normal)).unwrap();
        assert_eq!(report.sim_rank.len(), 4);
        assert!(report.alpha.is_none());
        assert_eq!(report.centrality.clustering, 0.0);
    }

    #[test]
    fn identical_specs_identical_reports() {
        let a = run_normal(&cell_spec(Mode::Normal)).unwrap();
        let b = run_normal(&cell_spec(Mode::Normal)).unwrap();
        assert_eq!(
            serde_json::to_vec(&a.stats).unwrap(),
            serde_json::to_vec(&b.stats).unwrap()
        );
        assert_eq!(a.sim_rank, b.sim_rank);
    }

    #[test]
    fn dos_on_non_utility_errors() {
        let spec = cell_spec(Mode::Dos { target: "trans-sub-0000".into() });
        assert!(matches!(run_dos(&spec), Err(ScenarioError::NotAUtility(_))));
    }

    #[test]
    fn dos_reduces_target_delivery_only() {
        // small single-cell case with uniform load so both runs finish fast
        let entities = crate::cases::one_cell_case();
        let topo = build_star(&entities).unwrap();
        let params = SimParams {
            load: LoadModel::FixedCount { total: 200, interval: 0.05 },
            size_model: SizeModel::Fixed(100),
            mean_packet_size: 100.0,
            port_rate: 50.0,
            ..Default::default()
        };
        let normal = run_simulation(&topo, &params, 60.0).unwrap();
        let attacked = run_simulation(&topo, &dos_params(&params, "utility-0"), 60.0).unwrap();
        // delivery collapses both at the utility's own sink ...
        let rn = delivery_ratio(&normal, &topo, "utility-0");
        let rd = delivery_ratio(&attacked, &topo, "utility-0");
        assert!(rn > 0.4, "normal delivery ratio {rn}");
        assert!(rd <= 0.05 * rn, "attacked {rd} vs normal {rn}");
        // ... and at the regulatory sink fed through the attacked router
        let reg_n = normal.sinks["sink:regulatory-0"].received as f64;
        let reg_d = attacked.sinks["sink:regulatory-0"].received as f64;
        assert!(reg_n > 50.0);
        assert!(reg_d <= 0.05 * reg_n, "regulatory sink {reg_d} vs {reg_n}");
    }

    #[test]
    fn sweep_covers_every_utility_once() {
        let entities = synth_case(BuiltinCase::Act500);
        let topo = build_star(&entities).unwrap();
        let cfg = SweepConfig { until: 8.0, ..Default::default() };
        let report = dos_sweep(&topo, "ACTIVSg500", &SimParams::default(), &cfg).unwrap();
        assert_eq!(report.records.len(), 4);
        assert!(!report.classified, "four utilities are exempt from classes");
        let mut seen: Vec<&str> = report.records.iter().map(|r| r.utility.as_str()).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 4, "each utility exactly once");
        let lost: BTreeMap<&str, u64> = report
            .records
            .iter()
            .map(|r| (r.utility.as_str(), r.substations_lost))
            .collect();
        assert_eq!(lost["utility-00"], 67);
        assert_eq!(lost["utility-01"], 50);
        assert_eq!(lost["utility-02"], 39);
        assert_eq!(lost["utility-03"], 52);
        assert!(report.normal_alpha.is_some());
    }

    #[test]
    fn sweep_is_deterministic() {
        let entities = synth_case(BuiltinCase::Act500);
        let topo = build_star(&entities).unwrap();
        let cfg = SweepConfig { until: 4.0, workers: 3, ..Default::default() };
        let a = dos_sweep(&topo, "ACTIVSg500", &SimParams::default(), &cfg).unwrap();
        let b = dos_sweep(&topo, "ACTIVSg500", &SimParams::default(), &cfg).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }

    #[test]
    fn direct_substations_match_assignment_in_star() {
        let topo = build_star(&synth_case(BuiltinCase::Act2000)).unwrap();
        assert_eq!(direct_substations(&topo, "utility-08"), 45);
        assert_eq!(direct_substations(&topo, "utility-02"), 199);
        assert_eq!(direct_substations(&topo, "utility-19"), 6);
    }

    #[test]
    fn fixture_replay_2000_star_classifies() {
        let report =
            severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Star).unwrap();
        assert!(report.classified);
        assert_eq!(report.records.len(), 20);
        let sizes: Vec<usize> = (1..=6)
            .rev()
            .map(|lvl| {
                report
                    .records
                    .iter()
                    .filter(|r| r.severity.map(|s| s.level()) == Some(lvl))
                    .count()
            })
            .collect();
        assert_eq!(sizes, vec![4, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn fixture_replay_500_exempt_from_classes() {
        let report =
            severity_report_from_fixtures(BuiltinCase::Act500, TopologyKind::Star).unwrap();
        assert!(!report.classified);
        assert_eq!(report.records.len(), 4);
        assert!(report.records.iter().all(|r| r.severity.is_none()));
        assert!(report.records.iter().all(|r| (r.alpha0 - 0.1).abs() < 1e-12));
    }

    #[test]
    fn hybrid_from_fixture_reports() {
        let star = severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Star).unwrap();
        let radial =
            severity_report_from_fixtures(BuiltinCase::Act2000, TopologyKind::Radial).unwrap();
        let entities = synth_case(BuiltinCase::Act2000);
        let (topo, decisions) = derive_hybrid(&entities, &star, &radial).unwrap();
        assert_eq!(topo.kind, TopologyKind::Hybrid);
        assert_eq!(decisions.len(), 20);
        for d in &decisions {
            let want = if d.severity_star < d.severity_radial {
                TopologyKind::Star
            } else {
                TopologyKind::Radial
            };
            assert_eq!(d.choice, want, "{}", d.utility);
        }
        // every decided-star utility keeps direct substation links
        for d in decisions.iter().filter(|d| d.choice == TopologyKind::Star) {
            assert_eq!(
                direct_substations(&topo, &d.utility) as usize,
                topo.substations_of(&d.utility).len(),
                "{}",
                d.utility
            );
        }
    }

    #[test]
    fn hybrid_all_equal_is_all_radial() {
        let entities = crate::cases::synth_case(BuiltinCase::Act500);
        let mk = |alpha0: f64| SeverityReport {
            case_name: "x".into(),
            kind: TopologyKind::Star,
            normal_alpha: None,
            records: (0..4)
                .map(|i| SweepRecord {
                    utility: format!("utility-{i:02}"),
                    alpha0,
                    alpha1: 0.1,
                    substations_lost: 10,
                    regulatory_affected: None,
                    severity: Some(SeverityClass::High),
                    score: Some(0.5),
                })
                .collect(),
            classified: true,
        };
        let (topo, decisions) = derive_hybrid(&entities, &mk(0.5), &mk(0.5)).unwrap();
        assert!(decisions.iter().all(|d| d.choice == TopologyKind::Radial));
        // radial wiring: no generation router feeds a utility router directly
        for n in topo.nodes() {
            if n.role == Role::GenerationSubstation && n.kind == ElementKind::Router {
                let idx = topo.node_index(&n.id).unwrap();
                for &t in topo.out(idx) {
                    assert_eq!(topo.node(t).role, Role::TransmissionSubstation);
                }
            }
        }
    }
}
