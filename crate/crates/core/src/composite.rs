//! Closed-form consensus coherence of bridge-node composites.
//!
//! For subgraphs `G_i` of sizes `n_i`, joined only through bridge nodes
//! `l_i` by a backbone `B`,
//!
//! ```text
//! H_C(G) = 1/(2N) [ Σ_i 2 n_i H_C(G_i)
//!                 + Σ_{i<j} n_i n_j r(l_i, l_j)
//!                 + Σ_i (N − n_i) C_i(l_i) ]
//! ```
//!
//! where `r` is resistance distance in the backbone and `C_i` is resistance
//! centrality within `G_i`. The backbone-specific functions substitute known
//! resistances: hop distance on trees, `|i − j|` on lines,
//! `k(n − k)/n` on rings, `2/n` on complete graphs.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::coherence::{self, CoherenceError};
use crate::graph::{CompositeSpec, Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompositeError {
    #[error("dimension mismatch: {summaries} summaries but {resistances}x{resistances} resistance matrix")]
    DimensionMismatch { summaries: usize, resistances: usize },
    #[error("at least {required} subgraphs required, got {got}")]
    TooFewSubgraphs { required: usize, got: usize },
    #[error("backbone is not a spanning tree on {0} nodes")]
    NotATree(usize),
    #[error("ordering is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("invalid subgraph summary: {0}")]
    InvalidSummary(String),
    #[error("composite has no bridge nodes")]
    MissingBridges,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

/// What the closed form needs to know about one subgraph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgraphSummary {
    pub size: usize,
    /// `H_C(G_i)`.
    pub coherence: f64,
    /// `C_i(l_i)`, resistance centrality of the bridge node within `G_i`.
    pub bridge_centrality: f64,
}

impl SubgraphSummary {
    pub fn new(size: usize, coherence: f64, bridge_centrality: f64) -> Result<Self, CompositeError> {
        if size == 0 {
            return Err(CompositeError::InvalidSummary("size must be at least 1".into()));
        }
        if !(coherence.is_finite() && coherence >= 0.0) {
            return Err(CompositeError::InvalidSummary(format!("coherence {coherence}")));
        }
        if !(bridge_centrality.is_finite() && bridge_centrality >= 0.0) {
            return Err(CompositeError::InvalidSummary(format!("bridge centrality {bridge_centrality}")));
        }
        Ok(SubgraphSummary { size, coherence, bridge_centrality })
    }

    pub fn from_graph(g: &Graph, bridge: usize) -> Result<Self, CompositeError> {
        let r = coherence::resistance_matrix(g)?;
        if bridge >= g.node_count() {
            return Err(GraphError::NodeOutOfRange { node: bridge, node_count: g.node_count() }.into());
        }
        let n = g.node_count();
        SubgraphSummary::new(n, r.total() / (2.0 * n as f64), r.centrality(bridge))
    }

    /// `Ω_i = 2 n_i H_C(G_i)`.
    pub fn total_resistance(&self) -> f64 {
        2.0 * self.size as f64 * self.coherence
    }
}

/// Summaries for every subgraph of a bridge-node composite.
pub fn summarize(spec: &CompositeSpec) -> Result<Vec<SubgraphSummary>, CompositeError> {
    let bridges = spec.bridge_nodes.as_ref().ok_or(CompositeError::MissingBridges)?;
    spec.subgraphs
        .iter()
        .zip(bridges)
        .map(|(g, &b)| SubgraphSummary::from_graph(g, b))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackboneKind {
    /// Edges between subgraph indices; must form a spanning tree.
    Tree(Vec<(usize, usize)>),
    /// Star centred on the given subgraph.
    Star(usize),
    /// Subgraph indices from one end of the line to the other.
    Line(Vec<usize>),
    /// Subgraph indices around the ring.
    Ring(Vec<usize>),
    Complete,
    /// Any connected backbone; resistances are computed numerically.
    General(Vec<(usize, usize)>),
}

impl BackboneKind {
    /// Backbone edges as pairs of subgraph indices for `n` subgraphs.
    pub fn edges(&self, n: usize) -> Result<Vec<(usize, usize)>, CompositeError> {
        Ok(match self {
            BackboneKind::Tree(e) | BackboneKind::General(e) => e.clone(),
            BackboneKind::Star(c) => {
                if *c >= n {
                    return Err(GraphError::SubgraphOutOfRange(*c).into());
                }
                (0..n).filter(|&i| i != *c).map(|i| (*c, i)).collect()
            }
            BackboneKind::Line(order) => {
                check_permutation(order, n)?;
                order.windows(2).map(|w| (w[0], w[1])).collect()
            }
            BackboneKind::Ring(order) => {
                check_permutation(order, n)?;
                if n < 3 {
                    return Err(CompositeError::TooFewSubgraphs { required: 3, got: n });
                }
                let mut e: Vec<_> = order.windows(2).map(|w| (w[0], w[1])).collect();
                e.push((order[n - 1], order[0]));
                e
            }
            BackboneKind::Complete => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        })
    }

    pub fn graph(&self, n: usize) -> Result<Graph, CompositeError> {
        Ok(Graph::from_edges(n, self.edges(n)?)?)
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), CompositeError> {
    let seen: BTreeSet<usize> = order.iter().copied().collect();
    if order.len() != n || seen.len() != n || order.iter().any(|&i| i >= n) {
        return Err(CompositeError::NotAPermutation(n));
    }
    Ok(())
}

/// Closed-form coherence given subgraph summaries and the matrix of backbone
/// resistances `r(l_i, l_j)`.
pub fn closed_form_coherence(
    summaries: &[SubgraphSummary],
    backbone_resistances: &DMatrix<f64>,
) -> Result<f64, CompositeError> {
    let n = summaries.len();
    if n == 0 {
        return Err(CompositeError::TooFewSubgraphs { required: 1, got: 0 });
    }
    if backbone_resistances.nrows() != n || backbone_resistances.ncols() != n {
        return Err(CompositeError::DimensionMismatch { summaries: n, resistances: backbone_resistances.nrows() });
    }
    Ok(closed_form(summaries, |i, j| backbone_resistances[(i, j)]))
}

fn closed_form(summaries: &[SubgraphSummary], resistance: impl Fn(usize, usize) -> f64) -> f64 {
    let total: usize = summaries.iter().map(|s| s.size).sum();
    let within: f64 = summaries.iter().map(SubgraphSummary::total_resistance).sum();
    let mut between = 0.0;
    for i in 0..summaries.len() {
        for j in i + 1..summaries.len() {
            between += (summaries[i].size * summaries[j].size) as f64 * resistance(i, j);
        }
    }
    let bridges: f64 = summaries.iter().map(|s| (total - s.size) as f64 * s.bridge_centrality).sum();
    (within + between + bridges) / (2.0 * total as f64)
}

/// Tree backbone: resistance equals hop distance.
pub fn tree_backbone_coherence(summaries: &[SubgraphSummary], tree: &[(usize, usize)]) -> Result<f64, CompositeError> {
    let n = summaries.len();
    let backbone = Graph::from_edges(n, tree.iter().copied())?;
    if tree.len() + 1 != n || !backbone.is_tree() {
        return Err(CompositeError::NotATree(n));
    }
    let hops: Vec<Vec<f64>> = (0..n)
        .map(|s| backbone.bfs_distances(s).into_iter().map(|d| d.unwrap_or(0) as f64).collect())
        .collect();
    Ok(closed_form(summaries, |i, j| hops[i][j]))
}

/// Line backbone visiting subgraphs in `ordering`; distance is the
/// difference in line position.
pub fn line_backbone_coherence(summaries: &[SubgraphSummary], ordering: &[usize]) -> Result<f64, CompositeError> {
    let pos = positions(summaries.len(), ordering)?;
    Ok(closed_form(summaries, |i, j| pos[i].abs_diff(pos[j]) as f64))
}

/// Ring backbone; needs at least three subgraphs.
pub fn ring_backbone_coherence(summaries: &[SubgraphSummary], ordering: &[usize]) -> Result<f64, CompositeError> {
    let n = summaries.len();
    if n < 3 {
        return Err(CompositeError::TooFewSubgraphs { required: 3, got: n });
    }
    let pos = positions(n, ordering)?;
    Ok(closed_form(summaries, |i, j| ring_resistance(n, pos[i].abs_diff(pos[j]))))
}

/// Resistance between ring nodes `k` hops apart on an `n`-ring.
pub fn ring_resistance(n: usize, k: usize) -> f64 {
    (k * (n - k)) as f64 / n as f64
}

pub fn complete_backbone_coherence(summaries: &[SubgraphSummary]) -> Result<f64, CompositeError> {
    let n = summaries.len();
    if n < 2 {
        return Err(CompositeError::TooFewSubgraphs { required: 2, got: n });
    }
    let r = 2.0 / n as f64;
    Ok(closed_form(summaries, |_, _| r))
}

/// Dispatches to the matching closed form; `General` backbones use
/// numerically computed resistances.
pub fn backbone_coherence(summaries: &[SubgraphSummary], backbone: &BackboneKind) -> Result<f64, CompositeError> {
    let n = summaries.len();
    match backbone {
        BackboneKind::Tree(edges) => tree_backbone_coherence(summaries, edges),
        BackboneKind::Star(_) => tree_backbone_coherence(summaries, &backbone.edges(n)?),
        BackboneKind::Line(order) => line_backbone_coherence(summaries, order),
        BackboneKind::Ring(order) => ring_backbone_coherence(summaries, order),
        BackboneKind::Complete => complete_backbone_coherence(summaries),
        BackboneKind::General(edges) => {
            let g = Graph::from_edges(n, edges.iter().copied())?;
            let r = coherence::resistance_matrix(&g)?;
            closed_form_coherence(summaries, r.as_matrix())
        }
    }
}

fn positions(n: usize, ordering: &[usize]) -> Result<Vec<usize>, CompositeError> {
    check_permutation(ordering, n)?;
    let mut pos = vec![0; n];
    for (p, &i) in ordering.iter().enumerate() {
        pos[i] = p;
    }
    Ok(pos)
}

/// Subgraph index that should sit at the centre of a star backbone: a
/// largest subgraph, lowest index on ties.
pub fn optimal_star_center(sizes: &[usize]) -> Result<usize, CompositeError> {
    if sizes.len() < 2 {
        return Err(CompositeError::TooFewSubgraphs { required: 2, got: sizes.len() });
    }
    let max = *sizes.iter().max().expect("non-empty");
    Ok(sizes.iter().position(|&s| s == max).expect("max is present"))
}

/// Organ-pipe arrangement for a line backbone: the largest subgraph at
/// position `⌊(n−1)/2⌋`, then the remaining subgraphs in decreasing size
/// alternately right and left of it, so the smallest end up at the ends.
/// Returns subgraph indices in line order. Equal sizes give the identity.
pub fn optimal_line_ordering(sizes: &[usize]) -> Result<Vec<usize>, CompositeError> {
    let n = sizes.len();
    if n < 2 {
        return Err(CompositeError::TooFewSubgraphs { required: 2, got: n });
    }
    if sizes.iter().all(|&s| s == sizes[0]) {
        return Ok((0..n).collect());
    }
    let mut by_size: Vec<usize> = (0..n).collect();
    by_size.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let center = (n - 1) / 2;
    let mut slots = vec![center];
    for step in 1..n {
        if center + step < n {
            slots.push(center + step);
        }
        if step <= center {
            slots.push(center - step);
        }
    }
    let mut order = vec![0; n];
    for (&slot, &sub) in slots.iter().zip(&by_size) {
        order[slot] = sub;
    }
    Ok(order)
}

/// `Σ_{i<j} |pos_i − pos_j| n_i n_j`, the only ordering-dependent term of
/// the line closed form.
pub fn line_arrangement_cost(sizes: &[usize], ordering: &[usize]) -> Result<usize, CompositeError> {
    let pos = positions(sizes.len(), ordering)?;
    let mut cost = 0;
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            cost += pos[i].abs_diff(pos[j]) * sizes[i] * sizes[j];
        }
    }
    Ok(cost)
}

/// Both lower-bound expressions for `n` subgraphs of uniform size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `(n(m−1) + m²(n−1) + 2n(n−1)(m−1)) / 2N`; attained by complete
    /// subgraphs on a complete backbone.
    pub corrected: f64,
    /// `(n(m−1) + 2m²(n−1) + 2n(n−1)(m−1)) / 2N`. The middle term double
    /// counts, so this exceeds the attainable minimum.
    pub uncorrected: f64,
}

impl LowerBound {
    /// The default bound.
    pub fn value(&self) -> f64 {
        self.corrected
    }
}

pub fn lower_bound(n: usize, m: usize) -> Result<LowerBound, CompositeError> {
    if n < 2 {
        return Err(CompositeError::TooFewSubgraphs { required: 2, got: n });
    }
    if m == 0 {
        return Err(CompositeError::InvalidSummary("subgraph size must be at least 1".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    let big_n = nf * mf;
    let shared = nf * (mf - 1.0) + 2.0 * nf * (nf - 1.0) * (mf - 1.0);
    Ok(LowerBound {
        corrected: (shared + mf * mf * (nf - 1.0)) / (2.0 * big_n),
        uncorrected: (shared + 2.0 * mf * mf * (nf - 1.0)) / (2.0 * big_n),
    })
}

/// Coherence of `n` paths of `m` nodes, bridged at path endpoints, on a line
/// backbone: the largest value over bridge-node composites with these sizes.
pub fn upper_bound(n: usize, m: usize) -> Result<f64, CompositeError> {
    if n < 2 {
        return Err(CompositeError::TooFewSubgraphs { required: 2, got: n });
    }
    if m == 0 {
        return Err(CompositeError::InvalidSummary("subgraph size must be at least 1".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    let big_n = nf * mf;
    Ok(nf * mf * (mf * mf - 1.0) / (12.0 * big_n)
        + nf * mf * mf * (nf * nf - 1.0) / (12.0 * big_n)
        + nf * mf * mf * (mf - 1.0) * (nf - 1.0) / (4.0 * big_n))
}

/// The composite attaining [`LowerBound::corrected`]: `n` copies of `K_m`
/// on a complete backbone, bridged at node 0.
pub fn complete_extremal_composite(n: usize, m: usize) -> Result<CompositeSpec, CompositeError> {
    let subgraphs = vec![Graph::complete(m)?; n];
    let backbone = BackboneKind::Complete.edges(n)?;
    Ok(CompositeSpec::with_backbone(subgraphs, vec![0; n], &backbone)?)
}

/// The composite attaining [`upper_bound`]: `n` copies of `P_m` bridged at
/// an endpoint, on a line backbone.
pub fn line_extremal_composite(n: usize, m: usize) -> Result<CompositeSpec, CompositeError> {
    let subgraphs = vec![Graph::path(m)?; n];
    let backbone = BackboneKind::Line((0..n).collect()).edges(n)?;
    Ok(CompositeSpec::with_backbone(subgraphs, vec![0; n], &backbone)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::coherence_consensus;
    use crate::graph::assemble;
    use approx::assert_relative_eq;
    use itertools::Itertools;

    fn worked_summaries() -> Vec<SubgraphSummary> {
        vec![
            SubgraphSummary::new(3, 4.0 / 6.0, 2.0).unwrap(),
            SubgraphSummary::new(4, (19.0 / 3.0) / 8.0, 7.0 / 3.0).unwrap(),
        ]
    }

    fn numeric(spec: &CompositeSpec) -> f64 {
        coherence_consensus(&assemble(spec).unwrap().graph).unwrap()
    }

    #[test]
    fn worked_example_closed_form() {
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_relative_eq!(closed_form_coherence(&worked_summaries(), &r).unwrap(), 8.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(tree_backbone_coherence(&worked_summaries(), &[(0, 1)]).unwrap(), 8.0 / 3.0, epsilon = 1e-12);

        let g1 = Graph::path(3).unwrap();
        let g2 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        let s1 = SubgraphSummary::from_graph(&g1, 1).unwrap();
        let s2 = SubgraphSummary::from_graph(&g2, 0).unwrap();
        assert_relative_eq!(s1.total_resistance(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(s2.total_resistance(), 19.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s2.bridge_centrality, 7.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn single_subgraph_reduces_to_its_coherence() {
        let s = SubgraphSummary::new(5, 1.7, 3.0).unwrap();
        assert_relative_eq!(closed_form_coherence(&[s], &DMatrix::zeros(1, 1)).unwrap(), 1.7, epsilon = 1e-12);
    }

    #[test]
    fn two_k2_bridged_is_p4() {
        let k2 = Graph::complete(2).unwrap();
        let s = SubgraphSummary::from_graph(&k2, 1).unwrap();
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let closed = closed_form_coherence(&[s, s], &r).unwrap();
        assert_relative_eq!(closed, coherence_consensus(&Graph::path(4).unwrap()).unwrap(), epsilon = 1e-12);
        assert_relative_eq!(closed, 1.25, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            closed_form_coherence(&worked_summaries(), &DMatrix::zeros(3, 3)),
            Err(CompositeError::DimensionMismatch { .. })
        ));
        assert!(SubgraphSummary::new(0, 0.0, 0.0).is_err());
        assert!(SubgraphSummary::new(2, -1.0, 0.0).is_err());
    }

    #[test]
    fn tree_validation() {
        let s = vec![SubgraphSummary::new(1, 0.0, 0.0).unwrap(); 3];
        assert_eq!(tree_backbone_coherence(&s, &[(0, 1), (1, 2), (2, 0)]), Err(CompositeError::NotATree(3)));
        assert_eq!(tree_backbone_coherence(&s, &[(0, 1)]), Err(CompositeError::NotATree(3)));
        // three K1's on a path: P3
        assert_relative_eq!(
            tree_backbone_coherence(&s, &[(0, 1), (1, 2)]).unwrap(),
            coherence_consensus(&Graph::path(3).unwrap()).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn star_of_k2s_matches_numeric() {
        let k2 = Graph::complete(2).unwrap();
        for bridge in 0..2 {
            let spec = CompositeSpec::with_backbone(vec![k2.clone(); 3], vec![bridge; 3], &[(0, 1), (0, 2)]).unwrap();
            let s = summarize(&spec).unwrap();
            let closed = backbone_coherence(&s, &BackboneKind::Star(0)).unwrap();
            assert_relative_eq!(closed, numeric(&spec), epsilon = 1e-12);
        }
    }

    #[test]
    fn line_two_subgraphs_is_unit_resistance() {
        let s = worked_summaries();
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_relative_eq!(
            line_backbone_coherence(&s, &[1, 0]).unwrap(),
            closed_form_coherence(&s, &r).unwrap(),
            epsilon = 1e-12
        );
        assert_eq!(line_backbone_coherence(&s, &[0, 0]), Err(CompositeError::NotAPermutation(2)));
    }

    #[test]
    fn ring_requires_three() {
        let s = worked_summaries();
        assert_eq!(
            ring_backbone_coherence(&s, &[0, 1]),
            Err(CompositeError::TooFewSubgraphs { required: 3, got: 2 })
        );
        assert_relative_eq!(ring_resistance(4, 1), 0.75);
        assert_relative_eq!(ring_resistance(4, 2), 1.0);
    }

    #[test]
    fn ring_of_three_matches_numeric() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let spec = CompositeSpec::with_backbone(vec![g; 3], vec![1; 3], &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = summarize(&spec).unwrap();
        assert_relative_eq!(ring_backbone_coherence(&s, &[0, 1, 2]).unwrap(), numeric(&spec), epsilon = 1e-12);
    }

    #[test]
    fn complete_two_matches_general_form() {
        let s = worked_summaries();
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_relative_eq!(
            complete_backbone_coherence(&s).unwrap(),
            closed_form_coherence(&s, &r).unwrap(),
            epsilon = 1e-12
        );
        assert!(complete_backbone_coherence(&s[..1]).is_err());
    }

    #[test]
    fn star_center_rule() {
        assert_eq!(optimal_star_center(&[3, 4]).unwrap(), 1);
        assert_eq!(optimal_star_center(&[5, 5, 5]).unwrap(), 0);
        assert_eq!(optimal_star_center(&[2, 7, 7, 1]).unwrap(), 1);
        assert!(optimal_star_center(&[3]).is_err());
    }

    #[test]
    fn star_center_is_best_star() {
        let mut rng = crate::generate::rng_from_seed(12);
        use rand::Rng;
        for _ in 0..200 {
            let n = rng.random_range(2..=5);
            let s: Vec<SubgraphSummary> = (0..n)
                .map(|_| {
                    let size = rng.random_range(1..=9);
                    SubgraphSummary::new(size, rng.random::<f64>(), rng.random::<f64>() * size as f64).unwrap()
                })
                .collect();
            let sizes: Vec<usize> = s.iter().map(|x| x.size).collect();
            let best = optimal_star_center(&sizes).unwrap();
            let chosen = backbone_coherence(&s, &BackboneKind::Star(best)).unwrap();
            for c in 0..n {
                assert!(chosen <= backbone_coherence(&s, &BackboneKind::Star(c)).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn line_ordering_examples() {
        let order = optimal_line_ordering(&[5, 4, 3]).unwrap();
        assert_eq!(order[1], 0);
        assert_eq!(optimal_line_ordering(&[2, 2, 2, 2]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(optimal_line_ordering(&[6, 6, 1, 1]).unwrap(), vec![2, 0, 1, 3]);
    }

    #[test]
    fn line_ordering_is_optimal_exhaustively() {
        let mut rng = crate::generate::rng_from_seed(99);
        use rand::Rng;
        for _ in 0..500 {
            let n = rng.random_range(2..=6);
            let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(1..=10)).collect();
            let chosen = line_arrangement_cost(&sizes, &optimal_line_ordering(&sizes).unwrap()).unwrap();
            let best = (0..n)
                .permutations(n)
                .map(|p| line_arrangement_cost(&sizes, &p).unwrap())
                .min()
                .unwrap();
            assert_eq!(chosen, best, "sizes {sizes:?}");
        }
    }

    #[test]
    fn bounds_small_cases() {
        let lb = lower_bound(2, 2).unwrap();
        assert_relative_eq!(lb.corrected, 1.25, epsilon = 1e-12);
        assert_relative_eq!(lb.uncorrected, 1.75, epsilon = 1e-12);
        assert_relative_eq!(lower_bound(2, 1).unwrap().value(), 0.25, epsilon = 1e-12);
        assert_relative_eq!(upper_bound(2, 2).unwrap(), 1.25, epsilon = 1e-12);
        let p4 = coherence_consensus(&Graph::path(4).unwrap()).unwrap();
        assert_relative_eq!(upper_bound(2, 2).unwrap(), p4, epsilon = 1e-12);
        assert!(lower_bound(1, 3).is_err());
        assert!(upper_bound(3, 0).is_err());
    }

    #[test]
    fn upper_bound_with_singletons_is_path() {
        for n in 2..8 {
            let hp = coherence_consensus(&Graph::path(n).unwrap()).unwrap();
            assert_relative_eq!(upper_bound(n, 1).unwrap(), hp, epsilon = 1e-12);
        }
        let p6 = coherence_consensus(&Graph::path(6).unwrap()).unwrap();
        assert_relative_eq!(upper_bound(2, 3).unwrap(), p6, epsilon = 1e-12);
    }

    #[test]
    fn extremal_composites_attain_bounds() {
        for n in 2..=6 {
            for m in 1..=6 {
                let lo = numeric(&complete_extremal_composite(n, m).unwrap());
                assert_relative_eq!(lo, lower_bound(n, m).unwrap().corrected, epsilon = 1e-9);
                let hi = numeric(&line_extremal_composite(n, m).unwrap());
                assert_relative_eq!(hi, upper_bound(n, m).unwrap(), epsilon = 1e-9);
                let s = summarize(&complete_extremal_composite(n, m).unwrap()).unwrap();
                assert_relative_eq!(complete_backbone_coherence(&s).unwrap(), lo, epsilon = 1e-9);
            }
        }
    }
}
