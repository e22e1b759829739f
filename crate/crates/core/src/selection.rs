//! Choosing `k` edges to add so that stubborn-agent coherence
//! `H_S = ½ tr (L + D)⁻¹` is as small as possible.
//!
//! The greedy routine adds, one at a time, the candidate edge whose addition
//! lowers `tr Q⁻¹` the most. Candidates are scored without refactorizing:
//! with `b = 1_u − 1_v`,
//!
//! ```text
//! tr (Q + b bᵀ)⁻¹ = tr Q⁻¹ − ‖Q⁻¹ b‖² / (1 + bᵀ Q⁻¹ b)
//! ```
//!
//! which costs `O(N)` per candidate given `Q⁻¹`. The exhaustive routine
//! enumerates every `k`-subset depth-first, carrying `Q⁻¹` down the
//! recursion with the same rank-one identity.
//!
//! Ties (values within a relative [`TIE_TOLERANCE`]) go to the
//! lexicographically smallest edge, or edge set. Reductions run over values
//! stored in candidate order, so results do not depend on thread scheduling.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{self, CoherenceError};
use crate::graph::{Edge, Graph, GraphError, Partition, StubbornnessProfile};

pub const TIE_TOLERANCE: f64 = 1e-10;

/// Default cap on the number of subsets [`optimal_select`] will enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("requested {k} edges but only {available} candidates exist")]
    TooFewCandidates { k: usize, available: usize },
    #[error("exhaustive search needs {subsets} subsets, over the budget of {budget}; use a smaller instance or k")]
    BudgetExceeded { subsets: u128, budget: u128 },
    #[error("partition covers {partition} nodes but graph has {graph}")]
    PartitionMismatch { partition: usize, graph: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidatePolicy {
    /// Missing pairs whose endpoints lie in different subgraphs.
    BetweenSubgraphs,
    /// Missing pairs inside a single subgraph.
    WithinSubgraphs,
    /// Every missing pair.
    AllMissing,
}

impl fmt::Display for CandidatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidatePolicy::BetweenSubgraphs => "between",
            CandidatePolicy::WithinSubgraphs => "within",
            CandidatePolicy::AllMissing => "all",
        })
    }
}

/// Candidate edges under `policy`, sorted lexicographically. Edges already in
/// `g` are never candidates.
pub fn candidate_edges(g: &Graph, partition: &Partition, policy: CandidatePolicy) -> Vec<Edge> {
    let n = g.node_count();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) {
                continue;
            }
            let same = partition.subgraph_of(u) == partition.subgraph_of(v);
            let keep = match policy {
                CandidatePolicy::BetweenSubgraphs => !same,
                CandidatePolicy::WithinSubgraphs => same,
                CandidatePolicy::AllMissing => true,
            };
            if keep {
                out.push(Edge::new(u, v).expect("u < v"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen_edges: Vec<Edge>,
    /// `H_S` before any addition, then after each chosen edge; length `k + 1`.
    pub coherence_trace: Vec<f64>,
    pub policy: CandidatePolicy,
    pub k: usize,
    pub seed: Option<u64>,
    /// Largest gap seen between rank-one scores and direct re-inversion, when
    /// verification was requested.
    pub max_rank_one_error: Option<f64>,
}

impl SelectionResult {
    pub fn initial_coherence(&self) -> f64 {
        self.coherence_trace[0]
    }

    pub fn final_coherence(&self) -> f64 {
        *self.coherence_trace.last().expect("trace is never empty")
    }

    /// Decrease in `H_S` contributed by each added edge.
    pub fn marginal_gains(&self) -> Vec<f64> {
        self.coherence_trace.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// Edges sorted lexicographically, for set comparisons.
    pub fn edge_set(&self) -> Vec<Edge> {
        let mut e = self.chosen_edges.clone();
        e.sort();
        e
    }

    /// CSV with columns `step,edge_u,edge_v,h_s`. Step 0 is the starting
    /// value and has empty edge columns.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,edge_u,edge_v,h_s\n");
        s.push_str(&format!("0,,,{}\n", self.coherence_trace[0]));
        for (i, (e, h)) in self.chosen_edges.iter().zip(&self.coherence_trace[1..]).enumerate() {
            s.push_str(&format!("{},{},{},{}\n", i + 1, e.u(), e.v(), h));
        }
        s
    }
}

/// Steps (1-based) where the greedy gain went up instead of down.
pub fn diminishing_returns_violations(result: &SelectionResult) -> Vec<usize> {
    let gains = result.marginal_gains();
    gains
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] + 1e-12)
        .map(|(i, _)| i + 2)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Recompute `Q⁻¹` from scratch after this many rank-one commits.
    pub refactor_every: usize,
    /// Score every candidate a second time by direct inversion and record
    /// the largest discrepancy.
    pub verify_rank_one: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { refactor_every: 32, verify_rank_one: false }
    }
}

/// `tr (Q + L_e)⁻¹` from `Q⁻¹`.
pub fn evaluate_candidate(q_inverse: &DMatrix<f64>, e: Edge) -> f64 {
    let (u, v) = e.endpoints();
    let n = q_inverse.nrows();
    let mut norm_sq = 0.0;
    for k in 0..n {
        let x = q_inverse[(k, u)] - q_inverse[(k, v)];
        norm_sq += x * x;
    }
    let quad = q_inverse[(u, u)] + q_inverse[(v, v)] - 2.0 * q_inverse[(u, v)];
    q_inverse.trace() - norm_sq / (1.0 + quad)
}

/// Replaces `Q⁻¹` with `(Q + L_e)⁻¹` in place.
pub fn rank_one_update(q_inverse: &mut DMatrix<f64>, e: Edge) {
    let (u, v) = e.endpoints();
    let w = q_inverse.column(u) - q_inverse.column(v);
    let quad = w[u] - w[v];
    let scale = 1.0 / (1.0 + quad);
    q_inverse.ger(-scale, &w, &w, 1.0);
}

fn add_edge(q: &mut DMatrix<f64>, e: Edge) {
    let (u, v) = e.endpoints();
    q[(u, u)] += 1.0;
    q[(v, v)] += 1.0;
    q[(u, v)] -= 1.0;
    q[(v, u)] -= 1.0;
}

fn direct_trace(q: &DMatrix<f64>, e: Edge) -> f64 {
    let mut q2 = q.clone();
    add_edge(&mut q2, e);
    coherence::spd_inverse(&q2).map(|m| m.trace()).unwrap_or(f64::NAN)
}

fn tie_slack(min: f64) -> f64 {
    TIE_TOLERANCE * min.abs().max(1.0)
}

fn check_inputs(g: &Graph, d: &StubbornnessProfile, partition: &Partition) -> Result<DMatrix<f64>, SelectionError> {
    if partition.node_count() != g.node_count() {
        return Err(SelectionError::PartitionMismatch { partition: partition.node_count(), graph: g.node_count() });
    }
    Ok(coherence::stubborn_matrix(g, d)?)
}

pub fn greedy_select(
    g: &Graph,
    d: &StubbornnessProfile,
    partition: &Partition,
    policy: CandidatePolicy,
    k: usize,
) -> Result<SelectionResult, SelectionError> {
    greedy_select_with(g, d, partition, policy, k, &GreedyOptions::default())
}

/// Greedy edge addition. Each round scores every remaining candidate, keeps
/// the lowest score (ties to the smallest edge), and commits it.
pub fn greedy_select_with(
    g: &Graph,
    d: &StubbornnessProfile,
    partition: &Partition,
    policy: CandidatePolicy,
    k: usize,
    options: &GreedyOptions,
) -> Result<SelectionResult, SelectionError> {
    let mut q = check_inputs(g, d, partition)?;
    let mut q_inv = coherence::stubborn_inverse(g, d)?;
    let mut remaining = candidate_edges(g, partition, policy);
    if k > remaining.len() {
        return Err(SelectionError::TooFewCandidates { k, available: remaining.len() });
    }

    let mut chosen = Vec::with_capacity(k);
    let mut trace = vec![0.5 * q_inv.trace()];
    let mut max_err: Option<f64> = options.verify_rank_one.then_some(0.0);

    for step in 0..k {
        let scores: Vec<f64> = remaining.par_iter().map(|&e| evaluate_candidate(&q_inv, e)).collect();
        if options.verify_rank_one {
            let worst = remaining
                .par_iter()
                .zip(&scores)
                .map(|(&e, &s)| (direct_trace(&q, e) - s).abs())
                .reduce(|| 0.0, f64::max);
            debug_assert!(worst < 1e-9, "rank-one score drifted by {worst}");
            max_err = max_err.map(|m| m.max(worst));
        }
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let pick = scores.iter().position(|&s| s <= min + tie_slack(min)).expect("candidates remain");
        let e = remaining.remove(pick);

        add_edge(&mut q, e);
        if (step + 1) % options.refactor_every.max(1) == 0 {
            q_inv = coherence::spd_inverse(&q).ok_or_else(|| CoherenceError::NotPositiveDefinite {
                component: Vec::new(),
            })?;
        } else {
            rank_one_update(&mut q_inv, e);
        }
        let h = 0.5 * q_inv.trace();
        let prev = *trace.last().expect("non-empty");
        debug_assert!(h < prev + 1e-12, "coherence rose from {prev} to {h}");
        trace.push(h);
        chosen.push(e);
    }

    let result = SelectionResult {
        chosen_edges: chosen,
        coherence_trace: trace,
        policy,
        k,
        seed: None,
        max_rank_one_error: max_err,
    };
    let violations = diminishing_returns_violations(&result);
    if !violations.is_empty() {
        log::info!("greedy marginal gains increased at steps {violations:?}");
    }
    Ok(result)
}

/// `C(m, k)`, saturating.
pub fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Running minimum that keeps every set within the tie tolerance.
#[derive(Debug, Clone)]
struct NearBest {
    min: f64,
    sets: Vec<(f64, Vec<usize>)>,
}

impl NearBest {
    fn new() -> Self {
        NearBest { min: f64::INFINITY, sets: Vec::new() }
    }

    fn offer(&mut self, value: f64, set: impl FnOnce() -> Vec<usize>) {
        if value > self.min + tie_slack(self.min) {
            return;
        }
        if value < self.min {
            self.min = value;
            let cut = self.min + tie_slack(self.min);
            self.sets.retain(|(v, _)| *v <= cut);
        }
        self.sets.push((value, set()));
    }

    fn merge(mut self, other: NearBest) -> NearBest {
        self.min = self.min.min(other.min);
        self.sets.extend(other.sets);
        let cut = self.min + tie_slack(self.min);
        self.sets.retain(|(v, _)| *v <= cut);
        self
    }

    fn best(self) -> Option<Vec<usize>> {
        self.sets.into_iter().map(|(_, s)| s).min()
    }
}

fn search(
    candidates: &[Edge],
    q_inv: &DMatrix<f64>,
    start: usize,
    remaining: usize,
    prefix: &mut Vec<usize>,
    best: &mut NearBest,
) {
    let m = candidates.len();
    if remaining == 1 {
        for (j, &e) in candidates.iter().enumerate().skip(start) {
            let value = evaluate_candidate(q_inv, e);
            best.offer(value, || {
                let mut s = prefix.clone();
                s.push(j);
                s
            });
        }
        return;
    }
    for j in start..=m - remaining {
        let mut next = q_inv.clone();
        rank_one_update(&mut next, candidates[j]);
        prefix.push(j);
        search(candidates, &next, j + 1, remaining - 1, prefix, best);
        prefix.pop();
    }
}

pub fn optimal_select(
    g: &Graph,
    d: &StubbornnessProfile,
    partition: &Partition,
    policy: CandidatePolicy,
    k: usize,
) -> Result<SelectionResult, SelectionError> {
    optimal_select_with_budget(g, d, partition, policy, k, DEFAULT_ENUMERATION_BUDGET)
}

/// Exhaustive search over all `k`-subsets of candidates. Refuses to start
/// when the subset count exceeds `budget`.
pub fn optimal_select_with_budget(
    g: &Graph,
    d: &StubbornnessProfile,
    partition: &Partition,
    policy: CandidatePolicy,
    k: usize,
    budget: u128,
) -> Result<SelectionResult, SelectionError> {
    check_inputs(g, d, partition)?;
    let q_inv = coherence::stubborn_inverse(g, d)?;
    let candidates = candidate_edges(g, partition, policy);
    let m = candidates.len();
    if k > m {
        return Err(SelectionError::TooFewCandidates { k, available: m });
    }
    let subsets = binomial(m, k);
    if subsets > budget {
        return Err(SelectionError::BudgetExceeded { subsets, budget });
    }

    let chosen: Vec<Edge> = if k == 0 {
        Vec::new()
    } else {
        let best = (0..=m - k)
            .into_par_iter()
            .map(|first| {
                let mut best = NearBest::new();
                let mut prefix = vec![first];
                if k == 1 {
                    best.offer(evaluate_candidate(&q_inv, candidates[first]), || prefix.clone());
                } else {
                    let mut next = q_inv.clone();
                    rank_one_update(&mut next, candidates[first]);
                    search(&candidates, &next, first + 1, k - 1, &mut prefix, &mut best);
                }
                best
            })
            .reduce(NearBest::new, NearBest::merge);
        best.best().expect("at least one subset").into_iter().map(|i| candidates[i]).collect()
    };

    // Trace along the chosen set, by direct inversion.
    let mut trace = vec![0.5 * q_inv.trace()];
    for j in 1..=chosen.len() {
        trace.push(coherence_with_edges(g, d, &chosen[..j])?);
    }
    Ok(SelectionResult {
        chosen_edges: chosen,
        coherence_trace: trace,
        policy,
        k,
        seed: None,
        max_rank_one_error: None,
    })
}

/// `H_S` of `g` with `edges` added, by direct inversion. Equal edge sets
/// give bit-identical values regardless of order.
pub fn coherence_with_edges(g: &Graph, d: &StubbornnessProfile, edges: &[Edge]) -> Result<f64, SelectionError> {
    let graph = g.with_edges(edges.iter().copied())?;
    Ok(coherence::coherence_stubborn(&graph, d)?)
}

/// `H_S(greedy) / H_S(optimal)`, at least 1 up to rounding. Both values are
/// computed by direct inversion, so the ratio is exactly 1 when the two
/// sets coincide.
pub fn greedy_optimal_ratio(
    g: &Graph,
    d: &StubbornnessProfile,
    partition: &Partition,
    policy: CandidatePolicy,
    k: usize,
) -> Result<f64, SelectionError> {
    let optimal = optimal_select(g, d, partition, policy, k)?;
    let greedy = greedy_select(g, d, partition, policy, k)?;
    Ok(coherence_with_edges(g, d, &greedy.chosen_edges)? / optimal.final_coherence())
}
