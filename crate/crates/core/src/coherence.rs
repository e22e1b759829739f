//! Consensus coherence `H_C = ½ tr L†`, stubborn-agent coherence
//! `H_S = ½ tr Q⁻¹` with `Q = L + D`, and resistance distances.
//!
//! `L†` comes from a symmetric eigendecomposition. Eigenvalues below
//! `N · ε · λ_max` count as zero; more than one zero eigenvalue means the
//! graph is disconnected and both `L†`-based coherence and resistance are
//! undefined.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::graph::{Graph, StubbornnessProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherenceError {
    #[error("coherence undefined: graph disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("Q = L + D is not positive definite: component {component:?} has no positive stubbornness")]
    NotPositiveDefinite { component: Vec<usize> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),
}

/// Relative tolerance used when comparing centralities for ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn zero_cutoff(eigenvalues: &[f64]) -> f64 {
    let n = eigenvalues.len() as f64;
    let max = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    n * f64::EPSILON * max
}

/// Moore–Penrose pseudo-inverse of a connected graph's Laplacian.
pub fn laplacian_pseudo_inverse(laplacian: &DMatrix<f64>) -> Result<DMatrix<f64>, CoherenceError> {
    let (rows, cols) = laplacian.shape();
    if rows != cols {
        return Err(CoherenceError::NotSquare(rows, cols));
    }
    let eig = SymmetricEigen::new(laplacian.clone());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let tol = zero_cutoff(&values);
    let zeros = values.iter().filter(|x| x.abs() <= tol).count();
    if zeros > 1 {
        return Err(CoherenceError::Disconnected { components: zeros });
    }
    let inv = eig.eigenvalues.map(|x| if x.abs() <= tol { 0.0 } else { 1.0 / x });
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&inv) * v.transpose())
}

/// `L† = (L + J/N)⁻¹ − J/N`; an independent route to the pseudo-inverse
/// used to cross-check the spectral path.
pub fn laplacian_pseudo_inverse_shifted(laplacian: &DMatrix<f64>) -> Result<DMatrix<f64>, CoherenceError> {
    let n = laplacian.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let shifted = laplacian + &j;
    match Cholesky::new(shifted) {
        Some(ch) => Ok(ch.inverse() - j),
        None => Err(CoherenceError::Disconnected { components: 2 }),
    }
}

/// `tr L†`, the sum of reciprocal nonzero Laplacian eigenvalues.
pub fn pseudo_inverse_trace(laplacian: &DMatrix<f64>) -> Result<f64, CoherenceError> {
    let (rows, cols) = laplacian.shape();
    if rows != cols {
        return Err(CoherenceError::NotSquare(rows, cols));
    }
    let values: Vec<f64> = laplacian.symmetric_eigenvalues().iter().copied().collect();
    let tol = zero_cutoff(&values);
    let zeros = values.iter().filter(|x| x.abs() <= tol).count();
    if zeros > 1 {
        return Err(CoherenceError::Disconnected { components: zeros });
    }
    Ok(values.iter().filter(|x| x.abs() > tol).map(|x| 1.0 / x).sum())
}

pub fn coherence_consensus(g: &Graph) -> Result<f64, CoherenceError> {
    Ok(0.5 * pseudo_inverse_trace(&g.laplacian())?)
}

/// Pairwise resistance distances of a connected graph with unit resistors.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix {
    values: DMatrix<f64>,
}

impl ResistanceMatrix {
    pub fn from_pseudo_inverse(pinv: &DMatrix<f64>) -> Self {
        let n = pinv.nrows();
        let values = DMatrix::from_fn(n, n, |u, v| {
            if u == v {
                0.0
            } else {
                pinv[(u, u)] + pinv[(v, v)] - 2.0 * pinv[(u, v)]
            }
        });
        ResistanceMatrix { values }
    }

    pub fn node_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[(u, v)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Kirchhoff index: sum over unordered pairs.
    pub fn total(&self) -> f64 {
        0.5 * self.values.sum()
    }

    /// Sum of resistances from `v` to every other node.
    pub fn centrality(&self, v: usize) -> f64 {
        self.values.row(v).sum()
    }

    pub fn centralities(&self) -> Vec<f64> {
        (0..self.node_count()).map(|v| self.centrality(v)).collect()
    }
}

pub fn resistance_matrix(g: &Graph) -> Result<ResistanceMatrix, CoherenceError> {
    Ok(ResistanceMatrix::from_pseudo_inverse(&laplacian_pseudo_inverse(&g.laplacian())?))
}

/// `Ω_G`, the sum of resistance distances over unordered node pairs.
pub fn total_effective_resistance(g: &Graph) -> Result<f64, CoherenceError> {
    // Ω = N tr L† for a connected graph.
    Ok(g.node_count() as f64 * pseudo_inverse_trace(&g.laplacian())?)
}

pub fn resistance_centrality(g: &Graph, v: usize) -> Result<f64, CoherenceError> {
    if v >= g.node_count() {
        return Err(CoherenceError::NodeOutOfRange { node: v, node_count: g.node_count() });
    }
    Ok(resistance_matrix(g)?.centrality(v))
}

/// Index of the smallest value, treating values within a relative
/// [`TIE_TOLERANCE`] of the minimum as ties won by the lowest index.
pub(crate) fn argmin_lowest_index(values: &[f64]) -> Option<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = TIE_TOLERANCE * min.abs().max(1.0);
    values.iter().position(|&x| x <= min + slack)
}

/// Node of minimum resistance centrality; ties go to the lowest index.
pub fn min_centrality_node(g: &Graph) -> Result<usize, CoherenceError> {
    let c = resistance_matrix(g)?.centralities();
    Ok(argmin_lowest_index(&c).expect("graphs have at least one node"))
}

/// `Q = L + diag(d)`.
pub fn stubborn_matrix(g: &Graph, d: &StubbornnessProfile) -> Result<DMatrix<f64>, CoherenceError> {
    if d.len() != g.node_count() {
        return Err(CoherenceError::DimensionMismatch { expected: g.node_count(), got: d.len() });
    }
    let mut q = g.laplacian();
    for (j, &dj) in d.values().iter().enumerate() {
        q[(j, j)] += dj;
    }
    Ok(q)
}

/// Names the first component of `g` with no positive stubbornness.
fn ungrounded_component(g: &Graph, d: &StubbornnessProfile) -> CoherenceError {
    let component = g
        .components()
        .into_iter()
        .find(|c| c.iter().all(|&j| d.values()[j] <= 0.0))
        .unwrap_or_default();
    CoherenceError::NotPositiveDefinite { component }
}

/// Inverse of a symmetric positive-definite `Q`, or `None` when the
/// Cholesky factorization fails.
pub(crate) fn spd_inverse(q: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(q.clone()).map(|c| c.inverse())
}

/// `Q⁻¹` for the stubborn system, with a diagnostic naming the ungrounded
/// component when `Q` is singular.
pub fn stubborn_inverse(g: &Graph, d: &StubbornnessProfile) -> Result<DMatrix<f64>, CoherenceError> {
    let q = stubborn_matrix(g, d)?;
    if let Some(c) = g.components().iter().find(|c| c.iter().all(|&j| d.values()[j] <= 0.0)) {
        return Err(CoherenceError::NotPositiveDefinite { component: c.clone() });
    }
    spd_inverse(&q).ok_or_else(|| ungrounded_component(g, d))
}

pub fn coherence_stubborn(g: &Graph, d: &StubbornnessProfile) -> Result<f64, CoherenceError> {
    Ok(0.5 * stubborn_inverse(g, d)?.trace())
}

/// Same value as [`coherence_stubborn`], reached through the leader
/// construction: add a noise-free node `s` joined to every `j` with weight
/// `d_j`, take the weighted Laplacian of the augmented graph, delete `s`'s
/// row and column, and return half the trace of the inverse of what
/// remains. Inversion goes through LU rather than Cholesky.
pub fn grounded_laplacian_coherence(g: &Graph, d: &StubbornnessProfile) -> Result<f64, CoherenceError> {
    let n = g.node_count();
    if d.len() != n {
        return Err(CoherenceError::DimensionMismatch { expected: n, got: d.len() });
    }
    let leader = n;
    let mut weights = DMatrix::<f64>::zeros(n + 1, n + 1);
    for e in g.edges() {
        let (u, v) = e.endpoints();
        weights[(u, v)] = 1.0;
        weights[(v, u)] = 1.0;
    }
    for (j, &dj) in d.values().iter().enumerate() {
        weights[(j, leader)] = dj;
        weights[(leader, j)] = dj;
    }
    let degrees: Vec<f64> = (0..=n).map(|i| weights.row(i).sum()).collect();
    let augmented = DMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { degrees[i] } else { -weights[(i, j)] });
    let grounded = augmented.remove_row(leader).remove_column(leader);
    if let Some(c) = g.components().iter().find(|c| c.iter().all(|&j| d.values()[j] <= 0.0)) {
        return Err(CoherenceError::NotPositiveDefinite { component: c.clone() });
    }
    let inv = grounded.lu().try_inverse().ok_or_else(|| ungrounded_component(g, d))?;
    Ok(0.5 * inv.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn worked_composite() -> Graph {
        Graph::from_edges(7, [(0, 1), (1, 2), (3, 4), (3, 5), (3, 6), (4, 5), (1, 3)]).unwrap()
    }

    /// All-pairs hop distances by BFS.
    fn hop_distance_sum(g: &Graph) -> f64 {
        (0..g.node_count())
            .map(|s| g.bfs_distances(s).iter().map(|d| d.unwrap() as f64).sum::<f64>())
            .sum::<f64>()
            / 2.0
    }

    #[test]
    fn pseudo_inverse_trace_small_graphs() {
        assert_relative_eq!(pseudo_inverse_trace(&Graph::complete(2).unwrap().laplacian()).unwrap(), 0.5);
        assert_relative_eq!(
            pseudo_inverse_trace(&Graph::complete(3).unwrap().laplacian()).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            pseudo_inverse_trace(&worked_composite().laplacian()).unwrap(),
            16.0 / 3.0,
            epsilon = 1e-12
        );
        assert_eq!(pseudo_inverse_trace(&Graph::empty(1).unwrap().laplacian()).unwrap(), 0.0);
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(coherence_consensus(&g), Err(CoherenceError::Disconnected { components: 2 }));
        assert!(resistance_matrix(&g).is_err());
        assert!(laplacian_pseudo_inverse_shifted(&g.laplacian()).is_err());
        assert_eq!(
            pseudo_inverse_trace(&Graph::empty(3).unwrap().laplacian()),
            Err(CoherenceError::Disconnected { components: 3 })
        );
    }

    #[test]
    fn consensus_coherence_values() {
        assert_relative_eq!(coherence_consensus(&worked_composite()).unwrap(), 8.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(coherence_consensus(&Graph::complete(2).unwrap()).unwrap(), 0.25, epsilon = 1e-12);
        // P4: hop distances sum to 10, tree so Ω = 10, H = 10 / 8.
        let p4 = Graph::path(4).unwrap();
        assert_eq!(hop_distance_sum(&p4), 10.0);
        assert_relative_eq!(coherence_consensus(&p4).unwrap(), 1.25, epsilon = 1e-12);
    }

    #[test]
    fn two_pseudo_inverse_routes_agree() {
        let g = worked_composite();
        let a = laplacian_pseudo_inverse(&g.laplacian()).unwrap();
        let b = laplacian_pseudo_inverse_shifted(&g.laplacian()).unwrap();
        assert!((a - b).abs().max() < 1e-12);
    }

    #[test]
    fn resistance_examples() {
        assert_relative_eq!(resistance_matrix(&Graph::complete(2).unwrap()).unwrap().get(0, 1), 1.0, epsilon = 1e-12);
        assert_relative_eq!(resistance_matrix(&Graph::path(3).unwrap()).unwrap().get(0, 2), 2.0, epsilon = 1e-12);
        assert_relative_eq!(resistance_matrix(&Graph::cycle(4).unwrap()).unwrap().get(0, 2), 1.0, epsilon = 1e-12);
        // ring: r = k(n-k)/n
        let r = resistance_matrix(&Graph::cycle(7).unwrap()).unwrap();
        for k in 1..7 {
            assert_relative_eq!(r.get(0, k), (k * (7 - k)) as f64 / 7.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn total_resistance_examples() {
        let g1 = Graph::path(3).unwrap();
        let g2 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        assert_relative_eq!(total_effective_resistance(&g1).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(total_effective_resistance(&g2).unwrap(), 19.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(total_effective_resistance(&Graph::complete(3).unwrap()).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(resistance_matrix(&g2).unwrap().total(), 19.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn centrality_examples() {
        let g1 = Graph::path(3).unwrap();
        let g2 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        assert_relative_eq!(resistance_centrality(&g1, 1).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(resistance_centrality(&g2, 0).unwrap(), 7.0 / 3.0, epsilon = 1e-12);
        for m in 2..7 {
            let expected = (m - 1) as f64 * 2.0 / m as f64;
            assert_relative_eq!(resistance_centrality(&Graph::complete(m).unwrap(), m - 1).unwrap(), expected, epsilon = 1e-12);
        }
        assert!(matches!(resistance_centrality(&g1, 3), Err(CoherenceError::NodeOutOfRange { .. })));
    }

    #[test]
    fn min_centrality_examples() {
        assert_eq!(min_centrality_node(&Graph::path(3).unwrap()).unwrap(), 1);
        assert_eq!(min_centrality_node(&Graph::complete(6).unwrap()).unwrap(), 0);
        let star = Graph::star(4).unwrap();
        let r = resistance_matrix(&star).unwrap();
        assert_relative_eq!(r.centrality(0), 3.0, epsilon = 1e-12);
        assert_relative_eq!(r.centrality(1), 5.0, epsilon = 1e-12);
        assert_eq!(min_centrality_node(&star).unwrap(), 0);
        // leaf-relabelled star: hub is node 2
        let star2 = Graph::from_edges(4, [(2, 0), (2, 1), (2, 3)]).unwrap();
        assert_eq!(min_centrality_node(&star2).unwrap(), 2);
    }

    #[test]
    fn stubborn_examples() {
        let k1 = Graph::empty(1).unwrap();
        let one = StubbornnessProfile::identity(1);
        assert_relative_eq!(coherence_stubborn(&k1, &one).unwrap(), 0.5);
        assert_relative_eq!(grounded_laplacian_coherence(&k1, &one).unwrap(), 0.5);

        let two = Graph::empty(2).unwrap();
        let d = StubbornnessProfile::new(vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(coherence_stubborn(&two, &d).unwrap(), 0.75, epsilon = 1e-12);

        // disjoint example subgraphs joined by (1,7) in 1-based labels
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (3, 4), (3, 5), (3, 6), (4, 5), (0, 6)]).unwrap();
        let id = StubbornnessProfile::identity(7);
        let hs = coherence_stubborn(&g, &id).unwrap();
        assert!((hs - 1.6503).abs() < 5e-5, "{hs}");
        assert_relative_eq!(grounded_laplacian_coherence(&g, &id).unwrap(), hs, epsilon = 1e-12);
    }

    #[test]
    fn ungrounded_component_is_reported() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let d = StubbornnessProfile::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = CoherenceError::NotPositiveDefinite { component: vec![2, 3] };
        assert_eq!(coherence_stubborn(&g, &d), Err(expected.clone()));
        assert_eq!(grounded_laplacian_coherence(&g, &d), Err(expected));
        let short = StubbornnessProfile::identity(3);
        assert!(matches!(coherence_stubborn(&g, &short), Err(CoherenceError::DimensionMismatch { .. })));
    }

    #[test]
    fn tree_resistance_equals_hop_distance() {
        let mut rng = crate::generate::rng_from_seed(4);
        for n in 2..10 {
            let t = crate::generate::random_tree_with(n, &mut rng).unwrap();
            let r = resistance_matrix(&t).unwrap();
            for s in 0..n {
                for (v, d) in t.bfs_distances(s).into_iter().enumerate() {
                    assert!((r.get(s, v) - d.unwrap() as f64).abs() < 1e-9);
                }
            }
        }
    }
}
