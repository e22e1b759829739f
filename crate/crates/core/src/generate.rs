//! Seeded random instances: Erdős–Rényi graphs, connected resampling, and
//! stubbornness profiles.
//!
//! Every generator is a pure function of its seed. Seeds feed a ChaCha8
//! stream, so outputs are identical across platforms.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{CompositeSpec, Graph, GraphError, StubbornnessProfile};

/// Default retry budget for [`random_connected_er`].
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// Probability that a random-mixture stubbornness entry is zero.
pub const ZERO_STUBBORNNESS_PROBABILITY: f64 = 0.2;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream index so sub-generators of one trial
/// never share a stream.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    erdos_renyi_with(n, p, &mut rng_from_seed(seed))
}

/// G(n, p): each of the `n(n-1)/2` pairs is an edge independently with
/// probability `p`.
pub fn erdos_renyi_with<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub fn random_connected_er(
    sizes: RangeInclusive<usize>,
    p: f64,
    seed: u64,
) -> Result<Graph, GraphError> {
    random_connected_er_with_budget(sizes, p, seed, DEFAULT_MAX_ATTEMPTS)
}

/// Draws a size uniformly from `sizes`, then resamples G(n, p) until the
/// result is connected.
pub fn random_connected_er_with_budget(
    sizes: RangeInclusive<usize>,
    p: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph, GraphError> {
    if sizes.is_empty() {
        return Err(GraphError::EmptyRange);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(sizes);
    for _ in 0..max_attempts {
        let g = erdos_renyi_with(n, p, &mut rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed { attempts: max_attempts, seed })
}

pub fn random_stubbornness(n: usize, seed: u64) -> StubbornnessProfile {
    random_stubbornness_with(n, &mut rng_from_seed(seed))
}

/// Each entry is 0 with probability 0.2, else uniform on (0, 1].
pub fn random_stubbornness_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StubbornnessProfile {
    let values = (0..n)
        .map(|_| {
            if rng.random_bool(ZERO_STUBBORNNESS_PROBABILITY) {
                0.0
            } else {
                // random::<f64>() is uniform on [0, 1); reflect onto (0, 1].
                1.0 - rng.random::<f64>()
            }
        })
        .collect();
    StubbornnessProfile::new(values).expect("mixture entries lie in [0, 1]")
}

/// Uniformly random labelled tree on `n` nodes (random Prüfer sequence).
pub fn random_tree_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Graph, GraphError> {
    if n <= 2 {
        return Graph::path(n);
    }
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &prufer {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &prufer {
        let leaf = (0..n).find(|&j| degree[j] == 1).expect("a leaf always exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&j| degree[j] == 1).collect();
    edges.push((rest[0], rest[1]));
    Graph::from_edges(n, edges)
}

/// Random connected graph: a random spanning tree plus each remaining pair
/// with probability `extra_p`.
pub fn random_connected_with<R: Rng + ?Sized>(
    n: usize,
    extra_p: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&extra_p) {
        return Err(GraphError::InvalidProbability(extra_p));
    }
    let tree = random_tree_with(n, rng)?;
    let mut edges: Vec<(usize, usize)> = tree.edges().map(|e| e.endpoints()).collect();
    for u in 0..n {
        for v in u + 1..n {
            if !tree.has_edge(u, v) && rng.random_bool(extra_p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Bridge-node composite with random connected subgraphs of the given
/// sizes, a uniformly random bridge per subgraph, and a random connected
/// backbone (spanning tree plus each extra pair with probability 0.3).
pub fn random_bridge_composite_with<R: Rng + ?Sized>(
    sizes: &[usize],
    rng: &mut R,
) -> Result<CompositeSpec, GraphError> {
    let subgraphs = sizes
        .iter()
        .map(|&m| {
            let extra = rng.random::<f64>();
            random_connected_with(m, extra, rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let bridges: Vec<usize> = sizes.iter().map(|&m| rng.random_range(0..m)).collect();
    let backbone = random_connected_with(sizes.len(), 0.3, rng)?;
    let edges: Vec<(usize, usize)> = backbone.edges().map(|e| e.endpoints()).collect();
    CompositeSpec::with_backbone(subgraphs, bridges, &edges)
}
