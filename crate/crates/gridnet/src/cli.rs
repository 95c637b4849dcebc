//! Command-line surface.
//!
//! Exit codes: 0 success, 2 input/configuration error, 3 runtime error.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bridge::{run_bridged, serve_peer, BridgeError, BridgePlan, Peer, PeerConfig};
use crate::cases;
use crate::io;
use crate::metrics::{CentralityTable, UndirectedGraph};
use crate::rank::{alpha_sweep, optimize_weights, solve_t, Weights};
use crate::scenario::{
    self, build_kind, severity_report_from_fixtures, CaseRef, Mode, ScenarioError, ScenarioSpec,
    SweepConfig,
};
use crate::sim::{run_simulation, LoadModel, SimError, SimParams, SizeModel};
use crate::topology::{check_manifest, load_manifest, Role, TopologyError, TopologyKind};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(name = "gridnet", about = "Grid communication-network simulation and resilience analysis")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Built-in case (500, 2000, 10k) or a JSON case file path[#case].
    #[arg(long, default_value = "500")]
    case: String,
    /// Wiring: star, radial, or hybrid.
    #[arg(long, default_value = "star")]
    kind: String,
    /// RNG seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory (or set GRIDNET_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for stats: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

impl CommonArgs {
    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("GRIDNET_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn kind(&self) -> Result<TopologyKind, CliError> {
        match self.kind.as_str() {
            "star" => Ok(TopologyKind::Star),
            "radial" => Ok(TopologyKind::Radial),
            "hybrid" => Ok(TopologyKind::Hybrid),
            other => Err(CliError::input(format!("unknown kind {other:?}"))),
        }
    }

    fn case_ref(&self) -> CaseRef {
        CaseRef::parse(&self.case)
    }
}

#[derive(Args, Clone)]
struct LoadArgs {
    /// Simulated horizon in seconds.
    #[arg(long, default_value_t = 1000.0)]
    until: f64,
    /// Fixed uniform load: total packet count (paired with --interval and
    /// --packet-size); default is the exponential traffic model.
    #[arg(long)]
    fixed_packets: Option<u64>,
    /// Emission interval for the fixed load, seconds.
    #[arg(long, default_value_t = 0.05)]
    interval: f64,
    /// Uniform packet size for the fixed load, bytes.
    #[arg(long, default_value_t = 100)]
    packet_size: u64,
    /// Override the router port rate, packets/second.
    #[arg(long)]
    port_rate: Option<f64>,
    /// Override the inter-arrival clamp, seconds.
    #[arg(long)]
    interarrival_cap: Option<f64>,
    /// Router queue capacity in bytes (unbounded when absent).
    #[arg(long)]
    queue_capacity: Option<u64>,
    /// JSON file of simulation parameters; flags apply on top of it.
    #[arg(long)]
    params_file: Option<PathBuf>,
}

impl LoadArgs {
    fn params(&self, seed: u64) -> Result<SimParams, CliError> {
        let mut p = match &self.params_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                let mut p: SimParams = serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                p.seed = seed;
                p
            }
            None => SimParams { seed, ..Default::default() },
        };
        if let Some(total) = self.fixed_packets {
            p.load = LoadModel::FixedCount { total, interval: self.interval };
            p.size_model = SizeModel::Fixed(self.packet_size);
        }
        if let Some(r) = self.port_rate {
            p.port_rate = r;
        }
        if let Some(c) = self.interarrival_cap {
            p.interarrival_cap = c;
        }
        if let Some(q) = self.queue_capacity {
            p.queue_capacity = Some(q);
        }
        Ok(p)
    }

    /// Horizon; fixed loads drain to completion when until is the default.
    fn until(&self) -> f64 {
        if self.fixed_packets.is_some() && self.until == 1000.0 {
            f64::INFINITY
        } else {
            self.until
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a topology and print per-role node and edge counts.
    Topology {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the element graph as JSON for re-import.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Write entity coordinates for plotting.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Check entity counts against the built-in manifest.
        #[arg(long)]
        check_manifest: bool,
    },
    /// Run a normal-condition simulation and write stats and rankings.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Scenario spec JSON (case, kind, mode, params, until); overrides
        /// the case/kind/load flags.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Attack one utility router and report the degraded run.
    Dos {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Utility entity id to attack.
        #[arg(long)]
        target: String,
    },
    /// Attack every utility in turn and classify severity.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Replay the published tables instead of simulating.
        #[arg(long)]
        fixtures: bool,
        /// Alpha grid step (defaults per cohort size).
        #[arg(long)]
        step: Option<f64>,
        /// Parallel attack workers.
        #[arg(long, default_value_t = 2)]
        workers: usize,
    },
    /// Solve the ranking optimization on fixture or computed ranks.
    Rank {
        #[command(flatten)]
        common: CommonArgs,
        /// Alpha penalty for the printed solution.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Alpha grid step for the sweep.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Grid-search the objective weights instead of the defaults.
        #[arg(long)]
        optimize_weights: bool,
    },
    /// Classify severity from a records CSV (utility,alpha0,alpha1,lost[,regulatory]).
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Records CSV path; defaults to the case's fixture table.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Derive the hybrid topology from star and radial severity reports.
    Hybrid {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Simulate the derived hybrid after writing the decision table.
        #[arg(long)]
        simulate: bool,
    },
    /// Serve the external peer for bridged runs.
    BridgePeer {
        #[command(flatten)]
        common: CommonArgs,
        /// Host to bind.
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Modeled egress cap, bits per second.
        #[arg(long, default_value_t = 60e6)]
        cap: f64,
        /// Exit after this many wall-clock seconds (runs until killed when absent).
        #[arg(long)]
        run_for: Option<f64>,
    },
    /// Run a simulation with utility and regulatory routers over TCP.
    BridgeRun {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        load: LoadArgs,
        /// Peer host.
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Per-frame response deadline, seconds.
        #[arg(long, default_value_t = 5.0)]
        timeout: f64,
        /// Start an in-process loopback peer for the run.
        #[arg(long)]
        loopback: bool,
    },
    /// Five-router validation fixture: per-router delay ordering across seeds.
    CompareCore {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeds to run.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Packets per feeder.
        #[arg(long, default_value_t = 200)]
        packets: u64,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: EXIT_INPUT }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: EXIT_RUNTIME }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match &e {
            ScenarioError::Topology(_)
            | ScenarioError::NotAUtility(_)
            | ScenarioError::MissingUtility(_)
            | ScenarioError::Unsupported(_)
            | ScenarioError::Rank(_) => CliError::input(e.to_string()),
            ScenarioError::Sim(SimError::InvalidParams(_)) => CliError::input(e.to_string()),
            _ => CliError::runtime(e.to_string()),
        }
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidParams(_) | SimError::UnknownNode(_) => CliError::input(e.to_string()),
            _ => CliError::runtime(e.to_string()),
        }
    }
}

impl From<BridgeError> for CliError {
    fn from(e: BridgeError) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<crate::rank::RankError> for CliError {
    fn from(e: crate::rank::RankError) -> Self {
        CliError::input(e.to_string())
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/version output
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn file_names(paths: &[PathBuf]) -> Vec<String> {
    paths
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect()
}

fn hybrid_reports(
    case: &CaseRef,
) -> Result<(crate::scenario::SeverityReport, crate::scenario::SeverityReport), CliError> {
    let builtin = case.builtin().ok_or_else(|| {
        CliError::input("hybrid wiring needs a built-in case (severity fixtures)")
    })?;
    let star = severity_report_from_fixtures(builtin, TopologyKind::Star)?;
    let radial = severity_report_from_fixtures(builtin, TopologyKind::Radial)?;
    Ok((star, radial))
}

fn build_topology_for(common: &CommonArgs) -> Result<crate::topology::Topology, CliError> {
    let entities = common.case_ref().entities()?;
    let kind = common.kind()?;
    match kind {
        TopologyKind::Hybrid => {
            let (star, radial) = hybrid_reports(&common.case_ref())?;
            Ok(build_kind(&entities, kind, Some((&star, &radial)))?)
        }
        _ => Ok(build_kind(&entities, kind, None)?),
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Topology { common, export, layout, check_manifest: check } => {
            let entities = common.case_ref().entities()?;
            let topo = build_topology_for(&common)?;
            let count = |role: Role| entities.iter().filter(|e| e.role == role).count();
            let gens = count(Role::GenerationSubstation);
            let trans = count(Role::TransmissionSubstation);
            let utils = count(Role::Utility);
            let regs = count(Role::Regulatory);
            println!(
                "{} nodes ({gens} generation + {trans} transmission + {utils} utility + {regs} regulatory)",
                gens + trans + utils + regs
            );
            println!(
                "elements: {} nodes, {} edges ({} wiring)",
                topo.node_count(),
                topo.edge_count(),
                topo.kind
            );
            if check {
                let manifest = load_manifest(crate::fixtures::CASE_MANIFEST)?;
                if let Some(m) = manifest.get(&common.case_ref().name()) {
                    check_manifest(&entities, m)?;
                    println!("manifest check: ok");
                }
            }
            if let Some(path) = export {
                std::fs::write(&path, io::topology_to_json(&topo))?;
                println!("graph written to {}", path.display());
            }
            if let Some(path) = layout {
                std::fs::write(&path, io::layout_to_csv(&entities))?;
                println!("layout written to {}", path.display());
            }
            Ok(())
        }
        Command::Simulate { common, load, spec } => {
            let started = Instant::now();
            let (topo, params, until, case_name, kind_name) = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    let spec: ScenarioSpec = serde_json::from_str(&text)
                        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    let entities = spec.case.entities()?;
                    let topo = match spec.kind {
                        TopologyKind::Hybrid => {
                            let (star, radial) = hybrid_reports(&spec.case)?;
                            build_kind(&entities, spec.kind, Some((&star, &radial)))?
                        }
                        _ => build_kind(&entities, spec.kind, None)?,
                    };
                    let params = match &spec.mode {
                        Mode::Normal => spec.params.clone(),
                        Mode::Dos { target } => scenario::dos_params(&spec.params, target),
                    };
                    (topo, params, spec.until, spec.case.name(), spec.kind.to_string())
                }
                None => {
                    let topo = build_topology_for(&common)?;
                    let params = load.params(common.seed)?;
                    (topo, params, load.until(), common.case_ref().name(), common.kind.clone())
                }
            };
            let stats = run_simulation(&topo, &params, until)?;
            let dir = common.out_dir();
            let mut outputs = Vec::new();
            let stats_name = format!("stats_{case_name}_{kind_name}.{}", common.format);
            let body = match common.format.as_str() {
                "json" => io::stats_to_json(&stats),
                _ => io::stats_to_csv(&stats),
            };
            outputs.push(io::write_output(&dir, &stats_name, &body)?);
            let graph = UndirectedGraph::from_topology(&topo);
            let table = CentralityTable::compute(&graph).map_err(|e| CliError::runtime(e.to_string()))?;
            outputs.push(io::write_output(&dir, "centrality.csv", &io::centrality_to_csv(&table))?);
            let utilities = topo.utilities();
            let rank = scenario::simulation_rank(&stats, &utilities)?;
            let mut rank_csv = String::from("utility,rank\n");
            for (u, r) in rank.as_map() {
                rank_csv.push_str(&format!("{u},{r}\n"));
            }
            outputs.push(io::write_output(&dir, "sim_rank.csv", &rank_csv)?);
            io::RunManifest {
                command: "simulate".into(),
                case: case_name,
                kind: Some(kind_name),
                seed: common.seed,
                until: Some(until),
                params,
                wall_clock_s: started.elapsed().as_secs_f64(),
                outputs: file_names(&outputs),
            }
            .write(&dir)?;
            println!(
                "delivered {} of {} packets; outputs in {}",
                stats.total_delivered(),
                stats.total_generated(),
                dir.display()
            );
            Ok(())
        }
        Command::Dos { common, load, target } => {
            let started = Instant::now();
            let spec = ScenarioSpec {
                case: common.case_ref(),
                kind: common.kind()?,
                mode: Mode::Dos { target: target.clone() },
                params: load.params(common.seed)?,
                until: load.until(),
            };
            let topo = build_topology_for(&common)?;
            let report = scenario::run_dos_on(&topo, &spec, &target)?;
            let dir = common.out_dir();
            let mut outputs = Vec::new();
            let body = match common.format.as_str() {
                "json" => io::stats_to_json(&report.stats),
                _ => io::stats_to_csv(&report.stats),
            };
            outputs.push(io::write_output(&dir, &format!("stats_dos_{target}.{}", common.format), &body)?);
            if let Some(alpha) = &report.alpha {
                println!(
                    "target {target}: alpha0 {} alpha1 {} substations lost {}",
                    alpha.alpha0,
                    alpha.alpha1,
                    report.substations_lost.unwrap_or(0)
                );
            }
            io::RunManifest {
                command: "dos".into(),
                case: common.case_ref().name(),
                kind: Some(common.kind.clone()),
                seed: common.seed,
                until: Some(load.until()),
                params: spec.params.clone(),
                wall_clock_s: started.elapsed().as_secs_f64(),
                outputs: file_names(&outputs),
            }
            .write(&dir)?;
            Ok(())
        }
        Command::Sweep { common, load, fixtures, step, workers } => {
            let started = Instant::now();
            let kind = common.kind()?;
            let report = if fixtures {
                let builtin = common
                    .case_ref()
                    .builtin()
                    .ok_or_else(|| CliError::input("fixture replay needs a built-in case"))?;
                severity_report_from_fixtures(builtin, kind)?
            } else {
                let topo = build_topology_for(&common)?;
                let params = load.params(common.seed)?;
                let cfg = SweepConfig {
                    until: if load.until == 1000.0 { scenario::SWEEP_HORIZON } else { load.until },
                    grid_step: step,
                    workers,
                    ..Default::default()
                };
                scenario::dos_sweep(&topo, &common.case_ref().name(), &params, &cfg)?
            };
            let dir = common.out_dir();
            let name = format!("severity_{}_{}.csv", report.case_name, report.kind);
            let path = io::write_output(&dir, &name, &io::severity_to_csv(&report))?;
            let json_path = io::write_output(
                &dir,
                &format!("severity_{}_{}.json", report.case_name, report.kind),
                &io::severity_to_json(&report),
            )?;
            io::RunManifest {
                command: "sweep".into(),
                case: report.case_name.clone(),
                kind: Some(common.kind.clone()),
                seed: common.seed,
                until: None,
                params: load.params(common.seed)?,
                wall_clock_s: started.elapsed().as_secs_f64(),
                outputs: file_names(&[path.clone(), json_path]),
            }
            .write(&dir)?;
            println!(
                "{} records, classified: {}; written to {}",
                report.records.len(),
                report.classified,
                path.display()
            );
            Ok(())
        }
        Command::Rank { common, alpha, step, optimize_weights: do_opt } => {
            let builtin = common
                .case_ref()
                .builtin()
                .ok_or_else(|| CliError::input("rank replay needs a built-in case"))?;
            let kind = common.kind()?;
            let inputs = crate::fixtures::rank_inputs(builtin, kind);
            let weights = if do_opt {
                let (w, _) = optimize_weights(&inputs);
                println!("optimized weights: a={} b={} c={}", w.a, w.b, w.c);
                w
            } else {
                Weights::default()
            };
            let t = solve_t(&inputs, &weights, alpha)?;
            let pair = alpha_sweep(&inputs, &weights, step)?;
            println!("alpha0 {} alpha1 {}", pair.alpha0, pair.alpha1);
            let dir = common.out_dir();
            let mut csv = String::from("utility,sim,betweenness,eigenvector,closeness,optimized\n");
            for u in inputs.nodes() {
                csv.push_str(&format!(
                    "{u},{},{},{},{},{}\n",
                    inputs.sim.rank_of(&u).unwrap(),
                    inputs.betweenness.rank_of(&u).unwrap(),
                    inputs.eigenvector.rank_of(&u).unwrap(),
                    inputs.closeness.rank_of(&u).unwrap(),
                    t.rank_of(&u).unwrap(),
                ));
            }
            let path = io::write_output(&dir, &format!("rank_{}_{}.csv", builtin.name(), kind), &csv)?;
            println!("ranking written to {}", path.display());
            Ok(())
        }
        Command::Classify { common, records } => {
            let inputs = match records {
                Some(path) => parse_records_csv(&path)?,
                None => {
                    let builtin = common
                        .case_ref()
                        .builtin()
                        .ok_or_else(|| CliError::input("classify needs --records or a built-in case"))?;
                    crate::fixtures::severity_inputs(builtin, common.kind()?)
                }
            };
            let classified = crate::rank::classify_severity(&inputs, Default::default())?;
            let mut csv = String::from("status,utility,alpha0,alpha1,substations_lost,score\n");
            for r in &classified {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.severity.name(),
                    r.utility,
                    r.alpha0,
                    r.alpha1,
                    r.substations_lost,
                    r.score
                ));
            }
            let dir = common.out_dir();
            let path = io::write_output(&dir, "classified.csv", &csv)?;
            println!("{} utilities classified; written to {}", classified.len(), path.display());
            Ok(())
        }
        Command::Hybrid { common, load, simulate } => {
            let started = Instant::now();
            let entities = common.case_ref().entities()?;
            let (star, radial) = hybrid_reports(&common.case_ref())?;
            let (topo, decisions) = scenario::derive_hybrid(&entities, &star, &radial)?;
            let dir = common.out_dir();
            let path = io::write_output(&dir, "hybrid_decisions.csv", &io::decisions_to_csv(&decisions))?;
            println!("{} decisions written to {}", decisions.len(), path.display());
            let mut outputs = vec![path.clone()];
            if simulate {
                let params = load.params(common.seed)?;
                let stats = run_simulation(&topo, &params, load.until())?;
                let p = io::write_output(&dir, "stats_hybrid.csv", &io::stats_to_csv(&stats))?;
                println!(
                    "hybrid run delivered {} of {} packets",
                    stats.total_delivered(),
                    stats.total_generated()
                );
                outputs.push(p);
            }
            io::RunManifest {
                command: "hybrid".into(),
                case: common.case_ref().name(),
                kind: Some("hybrid".into()),
                seed: common.seed,
                until: simulate.then(|| load.until()),
                params: load.params(common.seed)?,
                wall_clock_s: started.elapsed().as_secs_f64(),
                outputs: file_names(&outputs),
            }
            .write(&dir)?;
            Ok(())
        }
        Command::BridgePeer { common, host, cap, run_for } => {
            let topo = build_topology_for(&common)?;
            let mut plan = BridgePlan::for_topology(&topo, &host);
            plan.throughput_cap_bps = cap;
            let config = PeerConfig { seed: common.seed, ..Default::default() };
            let peer = serve_peer(&plan, &config)?;
            println!(
                "peer listening on {} ports from {} (cap {} bit/s)",
                plan.port_of.len(),
                plan.base_port,
                cap
            );
            match run_for {
                Some(secs) => std::thread::sleep(std::time::Duration::from_secs_f64(secs)),
                None => loop {
                    std::thread::sleep(std::time::Duration::from_secs(3600));
                },
            }
            let stats = peer.shutdown();
            print!("{}", Peer::stats_lines(&stats));
            Ok(())
        }
        Command::BridgeRun { common, load, host, timeout, loopback } => {
            let topo = build_topology_for(&common)?;
            let mut plan = BridgePlan::for_topology(&topo, &host);
            plan.timeout = std::time::Duration::from_secs_f64(timeout);
            let peer = if loopback {
                Some(serve_peer(&plan, &PeerConfig { seed: common.seed, ..Default::default() })?)
            } else {
                None
            };
            let params = load.params(common.seed)?;
            let run = run_bridged(&topo, &params, load.until(), &plan)?;
            let sent: u64 = run.sent.values().sum();
            let reinjected: u64 = run.reinjected.values().sum();
            println!(
                "bridged run: {} sent, {} re-injected, wall-clock {:.3}s",
                sent,
                reinjected,
                run.wall_clock.as_secs_f64()
            );
            if let Some(peer) = peer {
                let stats = peer.shutdown();
                print!("{}", Peer::stats_lines(&stats));
            }
            let dir = common.out_dir();
            io::write_output(&dir, "stats_bridged.csv", &io::stats_to_csv(&run.stats))?;
            Ok(())
        }
        Command::CompareCore { common, seeds, packets } => {
            let topo = cases::five_router_fixture();
            let mut orderings = BTreeSet::new();
            let mut csv = String::from("seed,router,mean_delay\n");
            for s in 0..seeds {
                let seed = common.seed + s;
                let params = core_fixture_params(seed, packets);
                let stats = run_simulation(&topo, &params, f64::INFINITY)?;
                let mut delays: Vec<(String, f64)> = (2..=5)
                    .map(|i| {
                        let id = format!("rt:core-r{i}");
                        let c = &stats.nodes[&id];
                        let d = if c.processed > 0 { c.sum_wait / c.processed as f64 } else { 0.0 };
                        (id, d)
                    })
                    .collect();
                for (id, d) in &delays {
                    csv.push_str(&format!("{seed},{id},{d}\n"));
                }
                delays.sort_by(|a, b| b.1.total_cmp(&a.1));
                let order: Vec<String> = delays.into_iter().map(|(id, _)| id).collect();
                orderings.insert(order.join(">"));
            }
            let dir = common.out_dir();
            let path = io::write_output(&dir, "core_comparison.csv", &csv)?;
            println!(
                "{} seeds, {} distinct delay orderings: {}",
                seeds,
                orderings.len(),
                orderings.iter().next().cloned().unwrap_or_default()
            );
            println!("per-seed delays written to {}", path.display());
            if orderings.len() == 1 {
                Ok(())
            } else {
                Err(CliError::runtime("delay ordering unstable across seeds"))
            }
        }
    }
}

/// Parameters of the five-router comparison fixture: equal packet budgets,
/// staggered mean sizes per feeder, aggregate router with headroom.
pub fn core_fixture_params(seed: u64, packets: u64) -> SimParams {
    let mut params = SimParams {
        seed,
        mean_packet_size: 100.0,
        port_rate: 2.2,
        monitor_cap: 20.0,
        ..Default::default()
    };
    for (gen, size) in cases::five_router_branch_sizes() {
        let o = params.node_overrides.entry(gen).or_default();
        o.mean_size = Some(size);
        o.interarrival_mean = Some(0.5);
        o.interarrival_cap = Some(None);
        o.budget = Some(packets);
    }
    params.node_overrides.entry("rt:core-r1".into()).or_default().port_rate = Some(11.0);
    params
}

fn parse_records_csv(path: &std::path::Path) -> Result<Vec<crate::rank::SeverityInput>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with("utility") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 4 {
            return Err(CliError::input(format!("line {}: need at least 4 columns", i + 1)));
        }
        let bad = |what: &str| CliError::input(format!("line {}: bad {what}", i + 1));
        out.push(crate::rank::SeverityInput {
            utility: cols[0].to_string(),
            alpha0: cols[1].parse().map_err(|_| bad("alpha0"))?,
            alpha1: cols[2].parse().map_err(|_| bad("alpha1"))?,
            substations_lost: cols[3].parse().map_err(|_| bad("substations_lost"))?,
            regulatory_affected: cols.get(4).filter(|s| !s.is_empty()).map(|s| s.to_string()),
        });
    }
    Ok(out)
}
