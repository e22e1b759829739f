//! Experiment drivers behind the `netcoh` CLI. Each driver is a pure
//! function of its inputs and seed and returns a report that renders as
//! text and/or CSV.

mod config;

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{self, CoherenceError};
use crate::composite::{self, CompositeError, SubgraphSummary};
use crate::generate::{self, derive_seed, rng_from_seed};
use crate::graph::{assemble, CompositeSpec, Edge, Graph, GraphError, Partition, StubbornnessProfile};
use crate::selection::{self, CandidatePolicy, SelectionError, SelectionResult};
use crate::simulator::{self, SimulationConfig, SimulationError, SimulationEstimate};

pub use config::{DMode, ExperimentConfig, DEFAULT_ER_P};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("trial {trial} (seed {seed}): {message}")]
    Trial { trial: usize, seed: u64, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

impl ExperimentError {
    /// 1 input error, 2 numerical failure, 3 enumeration budget exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config { .. } | ExperimentError::Input { .. } | ExperimentError::Io { .. } => 1,
            ExperimentError::Graph(_) => 1,
            ExperimentError::Selection(SelectionError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn read_file(path: &Path) -> Result<String, ExperimentError> {
    fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.display().to_string(), source })
}

fn input_error(path: &Path, e: impl fmt::Display) -> ExperimentError {
    ExperimentError::Input { path: path.display().to_string(), message: e.to_string() }
}

pub fn load_graph(path: &Path) -> Result<Graph, ExperimentError> {
    Graph::parse_edge_list(&read_file(path)?).map_err(|e| input_error(path, e))
}

pub fn load_profile(path: &Path) -> Result<StubbornnessProfile, ExperimentError> {
    StubbornnessProfile::parse_config(&read_file(path)?).map_err(|e| input_error(path, e))
}

pub fn load_composite(path: &Path) -> Result<CompositeSpec, ExperimentError> {
    CompositeSpec::parse_config(&read_file(path)?).map_err(|e| input_error(path, e))
}

pub fn load_config(path: &Path, base: ExperimentConfig) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = base;
    cfg.apply_text(&read_file(path)?).map_err(|e| input_error(path, e))?;
    Ok(cfg)
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io { path: dir.join(name).display().to_string(), source };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(name), contents).map_err(io)
}

// ---------------------------------------------------------------------------
// coherence

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub node_count: usize,
    pub edge_count: usize,
    /// `None` when the graph is disconnected.
    pub consensus: Option<ConsensusFigures>,
    pub stubborn: Option<f64>,
    /// Closed-form value when the input was a bridge-node composite.
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusFigures {
    pub coherence: f64,
    pub total_resistance: f64,
    pub centralities: Vec<f64>,
    pub labels: Vec<String>,
}

/// Consensus coherence, total resistance and centralities when `g` is
/// connected, plus `H_S` when a profile is given. A disconnected graph with
/// no profile is an error.
pub fn cmd_coherence(g: &Graph, profile: Option<&StubbornnessProfile>) -> Result<CoherenceReport, ExperimentError> {
    let consensus = match coherence::resistance_matrix(g) {
        Ok(r) => Some(ConsensusFigures {
            coherence: r.total() / (2.0 * g.node_count() as f64),
            total_resistance: r.total(),
            centralities: r.centralities(),
            labels: (0..g.node_count()).map(|v| g.label(v)).collect(),
        }),
        Err(e @ CoherenceError::Disconnected { .. }) => {
            if profile.is_none() {
                return Err(e.into());
            }
            None
        }
        Err(e) => return Err(e.into()),
    };
    let stubborn = profile.map(|d| coherence::coherence_stubborn(g, d)).transpose()?;
    Ok(CoherenceReport { node_count: g.node_count(), edge_count: g.edge_count(), consensus, stubborn, closed_form: None })
}

/// [`cmd_coherence`] on an assembled composite, adding the closed-form
/// value when bridge nodes are declared.
pub fn cmd_coherence_composite(
    spec: &CompositeSpec,
    profile: Option<&StubbornnessProfile>,
) -> Result<CoherenceReport, ExperimentError> {
    let c = assemble(spec)?;
    let mut report = cmd_coherence(&c.graph, profile)?;
    if spec.bridge_nodes.is_some() && report.consensus.is_some() {
        let summaries = composite::summarize(spec)?;
        let backbone: Vec<(usize, usize)> =
            spec.connecting_edges.iter().map(|(a, b)| (a.subgraph, b.subgraph)).collect();
        report.closed_form =
            Some(composite::backbone_coherence(&summaries, &composite::BackboneKind::General(backbone))?);
    }
    Ok(report)
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}  edges: {}", self.node_count, self.edge_count)?;
        match &self.consensus {
            Some(c) => {
                writeln!(f, "H_C = {:.4}", c.coherence)?;
                writeln!(f, "Omega = {:.4}", c.total_resistance)?;
                if let Some(h) = self.closed_form {
                    writeln!(f, "H_C (closed form) = {h:.4}")?;
                }
                writeln!(f, "resistance centrality:")?;
                for (label, c) in c.labels.iter().zip(&c.centralities) {
                    writeln!(f, "  {label}: {c:.4}")?;
                }
            }
            None => writeln!(f, "coherence undefined: graph disconnected")?,
        }
        if let Some(h) = self.stubborn {
            writeln!(f, "H_S = {h:.4}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// two-subgraph instances

/// Two disjoint random subgraphs and a stubbornness profile valid for them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialInstance {
    pub graph: Graph,
    pub partition: Partition,
    pub profile: StubbornnessProfile,
    pub seed: u64,
}

const PROFILE_ATTEMPTS: u64 = 1_000;

/// Instance for one trial. Both subgraphs depend only on `seed`, so the
/// identity and random D modes see the same graphs.
pub fn trial_instance(cfg: &ExperimentConfig, seed: u64, mode: DMode) -> Result<TrialInstance, GraphError> {
    let g1 = generate::random_connected_er(cfg.sizes(), cfg.er_p, derive_seed(seed, 0))?;
    let g2 = generate::random_connected_er(cfg.sizes(), cfg.er_p, derive_seed(seed, 1))?;
    let partition = Partition::from_sizes(&[g1.node_count(), g2.node_count()])?;
    let offset = g1.node_count();
    let edges = g1.edges().map(|e| e.endpoints()).chain(g2.edges().map(|e| (e.u() + offset, e.v() + offset)));
    let graph = Graph::from_edges(partition.node_count(), edges)?;
    let n = graph.node_count();
    let profile = match mode {
        DMode::Identity => StubbornnessProfile::identity(n),
        DMode::Random => (0..PROFILE_ATTEMPTS)
            .map(|a| generate::random_stubbornness(n, derive_seed(seed, 2 + a)))
            .find(|p| p.is_valid_for(&partition))
            .ok_or(GraphError::GenerationFailed { attempts: PROFILE_ATTEMPTS as usize, seed })?,
    };
    Ok(TrialInstance { graph, partition, profile, seed })
}

fn trial_seed(cfg: &ExperimentConfig, trial: usize) -> u64 {
    cfg.seed.wrapping_add(trial as u64)
}

fn trial_error(trial: usize, seed: u64, e: impl fmt::Display) -> ExperimentError {
    ExperimentError::Trial { trial, seed, message: e.to_string() }
}

// ---------------------------------------------------------------------------
// between vs within

#[derive(Debug, Clone, PartialEq)]
pub struct BetweenWithinRow {
    pub k: usize,
    pub mean_between: f64,
    pub mean_within: f64,
    pub d_mode: DMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetweenWithinReport {
    pub config: ExperimentConfig,
    /// Rows grouped by D mode, then ordered by `k = 0..=k_max`.
    pub rows: Vec<BetweenWithinRow>,
}

impl BetweenWithinReport {
    pub fn rows_for(&self, mode: DMode) -> impl Iterator<Item = &BetweenWithinRow> {
        self.rows.iter().filter(move |r| r.d_mode == mode)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.config.header_comment();
        s.push_str("k,mean_h_s_between,mean_h_s_within,d_mode\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.k, r.mean_between, r.mean_within, r.d_mode));
        }
        s
    }
}

/// Runs greedy selection twice per trial, once restricted to edges between
/// the two subgraphs and once to edges within them, and averages the `H_S`
/// curves over trials.
pub fn cmd_between_vs_within(cfg: &ExperimentConfig) -> Result<BetweenWithinReport, ExperimentError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &mode in &cfg.d_modes {
        let curves: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg, t);
                let inst = trial_instance(cfg, seed, mode).map_err(|e| trial_error(t, seed, e))?;
                let run = |policy| {
                    selection::greedy_select(&inst.graph, &inst.profile, &inst.partition, policy, cfg.k_max)
                        .map(|r| r.coherence_trace)
                        .map_err(|e| trial_error(t, seed, e))
                };
                Ok((run(CandidatePolicy::BetweenSubgraphs)?, run(CandidatePolicy::WithinSubgraphs)?))
            })
            .collect::<Result<_, ExperimentError>>()?;
        let trials = curves.len() as f64;
        for k in 0..=cfg.k_max {
            rows.push(BetweenWithinRow {
                k,
                mean_between: curves.iter().map(|(b, _)| b[k]).sum::<f64>() / trials,
                mean_within: curves.iter().map(|(_, w)| w[k]).sum::<f64>() / trials,
                d_mode: mode,
            });
        }
    }
    Ok(BetweenWithinReport { config: cfg.clone(), rows })
}

// ---------------------------------------------------------------------------
// greedy vs optimal

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOptimalRow {
    pub k: usize,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub trials_used: usize,
    pub d_mode: DMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOptimalReport {
    pub config: ExperimentConfig,
    pub rows: Vec<GreedyOptimalRow>,
    /// `(trial, seed, k)` for instances skipped over the enumeration budget.
    pub skipped: Vec<(usize, u64, usize)>,
}

impl GreedyOptimalReport {
    pub fn to_csv(&self) -> String {
        let mut s = self.config.header_comment();
        s.push_str("k,mean_ratio,min_ratio,max_ratio,trials,d_mode\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.k, r.mean_ratio, r.min_ratio, r.max_ratio, r.trials_used, r.d_mode
            ));
        }
        s
    }
}

/// `H_S(greedy) / H_S(optimal)` for `k = 1..=k_max` with every missing edge
/// as a candidate, averaged over trials.
pub fn cmd_greedy_vs_optimal(cfg: &ExperimentConfig) -> Result<GreedyOptimalReport, ExperimentError> {
    cfg.validate()?;
    let policy = CandidatePolicy::AllMissing;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &mode in &cfg.d_modes {
        // ratios[t][k-1]: None when skipped
        let per_trial: Vec<Vec<Option<f64>>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg, t);
                let inst = trial_instance(cfg, seed, mode).map_err(|e| trial_error(t, seed, e))?;
                let greedy = selection::greedy_select(&inst.graph, &inst.profile, &inst.partition, policy, cfg.k_max)
                    .map_err(|e| trial_error(t, seed, e))?;
                (1..=cfg.k_max)
                    .map(|k| {
                        match selection::optimal_select_with_budget(
                            &inst.graph,
                            &inst.profile,
                            &inst.partition,
                            policy,
                            k,
                            cfg.budget,
                        ) {
                            Ok(opt) => {
                                let h = selection::coherence_with_edges(
                                    &inst.graph,
                                    &inst.profile,
                                    &greedy.chosen_edges[..k],
                                )
                                .map_err(|e| trial_error(t, seed, e))?;
                                Ok(Some(h / opt.final_coherence()))
                            }
                            Err(SelectionError::BudgetExceeded { subsets, .. }) => {
                                log::warn!("skipping trial {t} (seed {seed}) at k={k}: {subsets} subsets over budget");
                                Ok(None)
                            }
                            Err(e) => Err(trial_error(t, seed, e)),
                        }
                    })
                    .collect()
            })
            .collect::<Result<_, ExperimentError>>()?;
        for k in 1..=cfg.k_max {
            let ratios: Vec<f64> = per_trial.iter().filter_map(|r| r[k - 1]).collect();
            for (t, r) in per_trial.iter().enumerate() {
                if r[k - 1].is_none() {
                    skipped.push((t, trial_seed(cfg, t), k));
                }
            }
            let used = ratios.len();
            rows.push(GreedyOptimalRow {
                k,
                mean_ratio: if used > 0 { ratios.iter().sum::<f64>() / used as f64 } else { f64::NAN },
                min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                trials_used: used,
                d_mode: mode,
            });
        }
    }
    Ok(GreedyOptimalReport { config: cfg.clone(), rows, skipped })
}

// ---------------------------------------------------------------------------
// worked example

/// The two example subgraphs with nodes labelled 1..=7: a path 1–2–3 and
/// the graph on {4,5,6,7} with edges 4–5, 4–6, 4–7, 5–6.
pub fn example_subgraphs() -> (Graph, Graph) {
    let labels = |r: std::ops::RangeInclusive<usize>| r.map(|i| i.to_string()).collect::<Vec<_>>();
    let g1 = Graph::path(3).and_then(|g| g.with_labels(labels(1..=3))).expect("static graph");
    let g2 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
        .and_then(|g| g.with_labels(labels(4..=7)))
        .expect("static graph");
    (g1, g2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub k: usize,
    pub greedy_edges: Vec<Edge>,
    pub greedy_h_s: f64,
    pub optimal_edges: Vec<Edge>,
    pub optimal_h_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkedExampleReport {
    /// `Ω` of each subgraph.
    pub total_resistances: [f64; 2],
    /// `C_i(l_i)` for bridges 2 and 4.
    pub bridge_centralities: [f64; 2],
    /// Closed form on the bridged composite.
    pub coherence: f64,
    /// Direct `½ tr L†` on the assembled composite.
    pub coherence_numeric: f64,
    pub greedy: SelectionResult,
    pub table: Vec<TableRow>,
    pub labels: Vec<String>,
}

impl WorkedExampleReport {
    fn fmt_edges(&self, edges: &[Edge]) -> String {
        let parts: Vec<String> =
            edges.iter().map(|e| format!("({},{})", self.labels[e.u()], self.labels[e.v()])).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Edges as 1-based label pairs, e.g. `(1,7)`.
    pub fn labelled(&self, edges: &[Edge]) -> Vec<(String, String)> {
        edges.iter().map(|e| (self.labels[e.u()].clone(), self.labels[e.v()].clone())).collect()
    }

    pub fn table_csv(&self) -> String {
        let mut s = String::from("k,greedy_edges,greedy_h_s,optimal_edges,optimal_h_s\n");
        let join = |edges: &[Edge]| {
            edges.iter().map(|e| format!("{}-{}", self.labels[e.u()], self.labels[e.v()])).collect::<Vec<_>>().join(" ")
        };
        for r in &self.table {
            s.push_str(&format!(
                "{},{},{:.4},{},{:.4}\n",
                r.k,
                join(&r.greedy_edges),
                r.greedy_h_s,
                join(&r.optimal_edges),
                r.optimal_h_s
            ));
        }
        s
    }
}

impl fmt::Display for WorkedExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "R_1 = {:.4}", self.total_resistances[0])?;
        writeln!(f, "R_2 = {:.4}", self.total_resistances[1])?;
        writeln!(f, "C_1(l_1) = {:.4}", self.bridge_centralities[0])?;
        writeln!(f, "C_2(l_2) = {:.4}", self.bridge_centralities[1])?;
        writeln!(f, "H_C(G) = {:.4}", self.coherence)?;
        writeln!(f)?;
        writeln!(f, "{:<3} {:<26} {:>8}   {:<26} {:>8}", "k", "greedy E_con", "H_S", "optimal E*", "H_S*")?;
        for r in &self.table {
            writeln!(
                f,
                "{:<3} {:<26} {:>8.4}   {:<26} {:>8.4}",
                r.k,
                self.fmt_edges(&r.greedy_edges),
                r.greedy_h_s,
                self.fmt_edges(&r.optimal_edges),
                r.optimal_h_s
            )?;
        }
        Ok(())
    }
}

/// Worked example: subgraph resistances, bridge centralities and composite
/// coherence for bridges 2 and 4, then greedy and exhaustive edge sets for
/// `k = 1..=3` under `D = I`.
pub fn cmd_worked_example() -> Result<WorkedExampleReport, ExperimentError> {
    let (g1, g2) = example_subgraphs();
    let s1 = SubgraphSummary::from_graph(&g1, 1)?;
    let s2 = SubgraphSummary::from_graph(&g2, 0)?;
    let spec = CompositeSpec::with_backbone(vec![g1.clone(), g2.clone()], vec![1, 0], &[(0, 1)])?;
    let coherence = composite::tree_backbone_coherence(&[s1, s2], &[(0, 1)])?;
    let coherence_numeric = coherence::coherence_consensus(&assemble(&spec)?.graph)?;

    let disjoint = assemble(&CompositeSpec::new(vec![g1, g2]))?;
    let d = StubbornnessProfile::identity(disjoint.graph.node_count());
    let policy = CandidatePolicy::BetweenSubgraphs;
    let greedy = selection::greedy_select_with(
        &disjoint.graph,
        &d,
        &disjoint.partition,
        policy,
        3,
        &selection::GreedyOptions { verify_rank_one: true, ..Default::default() },
    )?;
    let table = (1..=3)
        .map(|k| {
            let opt = selection::optimal_select(&disjoint.graph, &d, &disjoint.partition, policy, k)?;
            Ok(TableRow {
                k,
                greedy_edges: greedy.chosen_edges[..k].to_vec(),
                greedy_h_s: greedy.coherence_trace[k],
                optimal_edges: opt.edge_set(),
                optimal_h_s: opt.final_coherence(),
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let labels = disjoint.graph.labels().map(<[String]>::to_vec).unwrap_or_default();
    Ok(WorkedExampleReport {
        total_resistances: [s1.total_resistance(), s2.total_resistance()],
        bridge_centralities: [s1.bridge_centrality, s2.bridge_centrality],
        coherence,
        coherence_numeric,
        greedy,
        table,
        labels,
    })
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCheck {
    pub samples: usize,
    pub violations: usize,
    pub min_observed: f64,
    pub max_observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub m: usize,
    pub uncorrected_lower: f64,
    pub corrected_lower: f64,
    pub upper: f64,
    /// Numeric coherence of `n` copies of `K_m` on a complete backbone.
    pub complete_extremal: Option<f64>,
    /// Numeric coherence of `n` endpoint-bridged paths on a line backbone.
    pub line_extremal: Option<f64>,
    pub sandwich: Option<SandwichCheck>,
}

impl BoundsReport {
    /// The uncorrected lower bound sits above a coherence that is actually
    /// attained.
    pub fn uncorrected_lower_exceeds_minimum(&self) -> bool {
        self.uncorrected_lower > self.corrected_lower + 1e-12
    }
}

/// Largest composite (in nodes) for which extremal composites are computed.
const NUMERIC_NODE_LIMIT: usize = 400;

/// Bounds for `n` subgraphs of `m` nodes; with `samples > 0`, also checks
/// the corrected lower and the upper bound against that many random
/// bridge-node composites.
pub fn cmd_bounds(n: usize, m: usize, samples: usize, seed: u64) -> Result<BoundsReport, ExperimentError> {
    let lower = composite::lower_bound(n, m)?;
    let upper = composite::upper_bound(n, m)?;
    let small = n * m <= NUMERIC_NODE_LIMIT;
    let numeric = |spec: CompositeSpec| -> Result<f64, ExperimentError> {
        Ok(coherence::coherence_consensus(&assemble(&spec)?.graph)?)
    };
    let complete_extremal = small.then(|| numeric(composite::complete_extremal_composite(n, m)?)).transpose()?;
    let line_extremal = small.then(|| numeric(composite::line_extremal_composite(n, m)?)).transpose()?;

    let sandwich = if samples > 0 && small {
        let values: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_from_seed(derive_seed(seed, i as u64));
                let spec = generate::random_bridge_composite_with(&vec![m; n], &mut rng)?;
                numeric(spec)
            })
            .collect::<Result<_, ExperimentError>>()?;
        let slack = 1e-9;
        Some(SandwichCheck {
            samples,
            violations: values.iter().filter(|&&h| h < lower.corrected - slack || h > upper + slack).count(),
            min_observed: values.iter().copied().fold(f64::INFINITY, f64::min),
            max_observed: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    } else {
        None
    };
    Ok(BoundsReport {
        n,
        m,
        uncorrected_lower: lower.uncorrected,
        corrected_lower: lower.corrected,
        upper,
        complete_extremal,
        line_extremal,
        sandwich,
    })
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, m = {}, N = {}", self.n, self.m, self.n * self.m)?;
        write!(f, "lower bound (uncorrected) = {:.4}", self.uncorrected_lower)?;
        if self.uncorrected_lower_exceeds_minimum() {
            write!(f, "  [exceeds the attainable minimum]")?;
        }
        writeln!(f)?;
        writeln!(f, "lower bound (corrected) = {:.4}", self.corrected_lower)?;
        writeln!(f, "upper bound             = {:.4}", self.upper)?;
        if let Some(h) = self.complete_extremal {
            writeln!(f, "complete/K_m composite  = {h:.4}")?;
        }
        if let Some(h) = self.line_extremal {
            writeln!(f, "line/path composite     = {h:.4}")?;
        }
        if let Some(s) = &self.sandwich {
            writeln!(
                f,
                "random composites: {} samples, {} outside bounds, observed [{:.4}, {:.4}]",
                s.samples, s.violations, s.min_observed, s.max_observed
            )?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub measure: &'static str,
    pub estimate: SimulationEstimate,
}

impl SimulateReport {
    pub fn to_csv(&self) -> String {
        format!("measure,{}\n{},{}\n", SimulationEstimate::csv_header(), self.measure, self.estimate.csv_row())
    }
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.estimate;
        writeln!(f, "{} analytic  = {:.4}", self.measure, e.analytic)?;
        writeln!(f, "{} estimate  = {:.4} ± {:.4} (1 SE)", self.measure, e.estimate, e.standard_error)?;
        writeln!(f, "z = {:.3}", e.z_score())?;
        writeln!(
            f,
            "dt = {:.3e}, burn-in = {:.2}, sample time = {:.2}, trials = {}, seed = {}",
            e.config.time_step, e.config.burn_in_time, e.config.sample_time, e.config.trial_count, e.config.rng_seed
        )
    }
}

/// Simulates `H_S` when a profile is given, else `H_C`.
pub fn cmd_simulate(
    g: &Graph,
    profile: Option<&StubbornnessProfile>,
    cfg: &SimulationConfig,
) -> Result<SimulateReport, ExperimentError> {
    Ok(match profile {
        Some(d) => SimulateReport { measure: "H_S", estimate: simulator::simulate_stubborn_coherence(g, d, cfg)? },
        None => SimulateReport { measure: "H_C", estimate: simulator::simulate_consensus_coherence(g, cfg)? },
    })
}
