//! Monte Carlo estimates of both coherence measures from the stochastic
//! dynamics `ẋ = −M x + ν`, `M = L` (consensus) or `M = Q` (stubborn).
//!
//! Integration is Euler–Maruyama, `x ← x − Δt·M x + √Δt·w`. Its stationary
//! variance along an eigenmode `λ` is `1 / (λ (2 − Δt λ))` rather than
//! `1 / (2λ)`, a relative bias of about `Δt λ / 2`. The default step
//! `0.01 / λ_max` keeps that bias well under the sampling error of the
//! default run length.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::coherence::{self, CoherenceError};
use crate::generate::rng_from_seed;
use crate::graph::{Graph, StubbornnessProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("time step {time_step} violates the stability bound Δt < 2/λ_max = {bound}")]
    UnstableStep { time_step: f64, bound: f64 },
    #[error("state diverged at t = {time}; Δt must stay below 2/λ_max = {bound}")]
    Diverged { time: f64, bound: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

/// Run parameters. Unset times are derived from the spectrum of the system
/// matrix: `Δt = step_fraction / λ_max`, burn-in `10 / λ_min`, sampling
/// `200 / λ_min`, where `λ_min` is the slowest relevant mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub time_step: Option<f64>,
    pub burn_in_time: Option<f64>,
    pub sample_time: Option<f64>,
    pub step_fraction: f64,
    pub trial_count: usize,
    pub rng_seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            time_step: None,
            burn_in_time: None,
            sample_time: None,
            step_fraction: 0.01,
            trial_count: 16,
            rng_seed: 0,
        }
    }
}

/// Concrete times after spectral defaults are filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedConfig {
    pub time_step: f64,
    pub burn_in_time: f64,
    pub sample_time: f64,
    pub trial_count: usize,
    pub rng_seed: u64,
}

impl SimulationConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn resolve(&self, lambda_min: f64, lambda_max: f64) -> Result<ResolvedConfig, SimulationError> {
        if self.trial_count < 2 {
            return Err(SimulationError::InvalidConfig("need at least 2 trials for a standard error".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 2.0) {
            return Err(SimulationError::InvalidConfig(format!("step fraction {}", self.step_fraction)));
        }
        let time_step = self.time_step.unwrap_or(self.step_fraction / lambda_max);
        let burn_in_time = self.burn_in_time.unwrap_or(10.0 / lambda_min);
        let sample_time = self.sample_time.unwrap_or(200.0 / lambda_min);
        // negated so NaN is rejected too
        if !(time_step > 0.0) || !(sample_time > 0.0) || burn_in_time < 0.0 {
            return Err(SimulationError::InvalidConfig(format!(
                "time_step {time_step}, burn_in {burn_in_time}, sample_time {sample_time}"
            )));
        }
        let bound = 2.0 / lambda_max;
        if time_step >= bound {
            return Err(SimulationError::UnstableStep { time_step, bound });
        }
        Ok(ResolvedConfig { time_step, burn_in_time, sample_time, trial_count: self.trial_count, rng_seed: self.rng_seed })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEstimate {
    /// Closed-form value the estimate targets.
    pub analytic: f64,
    /// Mean over trials of the time-averaged total variance.
    pub estimate: f64,
    pub standard_error: f64,
    /// Per-node time-averaged variance, mean over trials.
    pub per_node: Vec<f64>,
    pub per_node_standard_error: Vec<f64>,
    pub config: ResolvedConfig,
}

impl SimulationEstimate {
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.analytic) / self.standard_error
    }

    pub fn csv_header() -> &'static str {
        "analytic,estimate,standard_error,z_score,time_step,burn_in_time,sample_time,trials,seed"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.analytic,
            self.estimate,
            self.standard_error,
            self.z_score(),
            self.config.time_step,
            self.config.burn_in_time,
            self.config.sample_time,
            self.config.trial_count,
            self.config.rng_seed
        )
    }
}

/// `M x` with `M = diag − A`, using adjacency lists.
struct SparseSystem {
    diag: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl SparseSystem {
    fn new(g: &Graph, extra_diag: Option<&[f64]>) -> Self {
        let mut diag: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
        if let Some(extra) = extra_diag {
            for (a, b) in diag.iter_mut().zip(extra) {
                *a += b;
            }
        }
        SparseSystem { diag, adj: g.adjacency_lists() }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = self.diag[i] * x[i];
            for &j in &self.adj[i] {
                s -= x[j];
            }
            out[i] = s;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Centering {
    /// Deviations from the instantaneous network average.
    Mean,
    /// Deviations from zero, the noise-free leader state.
    Zero,
}

/// Time-averaged per-node squared deviation for one trial.
fn run_trial(
    system: &SparseSystem,
    cfg: &ResolvedConfig,
    centering: Centering,
    seed: u64,
    lambda_max: f64,
) -> Result<Vec<f64>, SimulationError> {
    let n = system.diag.len();
    let mut rng = rng_from_seed(seed);
    let mut x = vec![0.0; n];
    let mut mx = vec![0.0; n];
    let dt = cfg.time_step;
    let noise_scale = dt.sqrt();
    let burn_steps = (cfg.burn_in_time / dt).ceil() as usize;
    let sample_steps = ((cfg.sample_time / dt).ceil() as usize).max(1);
    let mut acc = vec![0.0; n];

    for step in 0..burn_steps + sample_steps {
        system.apply(&x, &mut mx);
        for i in 0..n {
            let w: f64 = rng.sample(StandardNormal);
            x[i] += -dt * mx[i] + noise_scale * w;
        }
        if step % 1024 == 0 && x.iter().any(|v| !v.is_finite() || v.abs() > 1e150) {
            return Err(SimulationError::Diverged { time: step as f64 * dt, bound: 2.0 / lambda_max });
        }
        if step >= burn_steps {
            let center = match centering {
                Centering::Mean => x.iter().sum::<f64>() / n as f64,
                Centering::Zero => 0.0,
            };
            for i in 0..n {
                let dev = x[i] - center;
                acc[i] += dev * dev;
            }
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SimulationError::Diverged { time: (burn_steps + sample_steps) as f64 * dt, bound: 2.0 / lambda_max });
    }
    Ok(acc.into_iter().map(|a| a / sample_steps as f64).collect())
}

/// Sample mean and standard error of the mean, in input order.
fn mean_and_se(samples: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = samples.clone().count() as f64;
    let mean = samples.clone().sum::<f64>() / count;
    let var = samples.map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

fn simulate(
    system: SparseSystem,
    analytic: f64,
    lambda_min: f64,
    lambda_max: f64,
    centering: Centering,
    cfg: &SimulationConfig,
) -> Result<SimulationEstimate, SimulationError> {
    let resolved = cfg.resolve(lambda_min, lambda_max)?;
    let trials: Vec<Vec<f64>> = (0..resolved.trial_count)
        .into_par_iter()
        .map(|t| run_trial(&system, &resolved, centering, resolved.rng_seed.wrapping_add(t as u64), lambda_max))
        .collect::<Result<_, _>>()?;
    let n = system.diag.len();
    let (estimate, standard_error) = mean_and_se(trials.iter().map(|v| v.iter().sum::<f64>()));
    let (per_node, per_node_standard_error) = (0..n).map(|i| mean_and_se(trials.iter().map(|v| v[i]))).unzip();
    Ok(SimulationEstimate { analytic, estimate, standard_error, per_node, per_node_standard_error, config: resolved })
}

fn spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Estimates `H_C` by simulating `ẋ = −L x + ν` and time-averaging
/// `Σ_j (x_j − x̄)²`.
pub fn simulate_consensus_coherence(g: &Graph, cfg: &SimulationConfig) -> Result<SimulationEstimate, SimulationError> {
    let analytic = coherence::coherence_consensus(g)?;
    let values = spectrum(&g.laplacian());
    let lambda_max = *values.last().expect("non-empty");
    if g.node_count() == 1 {
        return Err(SimulationError::InvalidConfig("a single node has no consensus dynamics".into()));
    }
    // values[0] is the consensus mode.
    let lambda_min = values[1];
    simulate(SparseSystem::new(g, None), analytic, lambda_min, lambda_max, Centering::Mean, cfg)
}

/// Estimates `H_S` by simulating `ẋ = −Q x + ν` and time-averaging
/// `Σ_j x_j²`.
pub fn simulate_stubborn_coherence(
    g: &Graph,
    d: &StubbornnessProfile,
    cfg: &SimulationConfig,
) -> Result<SimulationEstimate, SimulationError> {
    let analytic = coherence::coherence_stubborn(g, d)?;
    let values = spectrum(&coherence::stubborn_matrix(g, d)?);
    let (lambda_min, lambda_max) = (values[0], *values.last().expect("non-empty"));
    simulate(SparseSystem::new(g, Some(d.values())), analytic, lambda_min, lambda_max, Centering::Zero, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_consensus() {
        let est = simulate_consensus_coherence(&Graph::complete(2).unwrap(), &SimulationConfig::default()).unwrap();
        assert_eq!(est.analytic, 0.25);
        assert!(est.z_score().abs() < 3.0, "{est:?}");
    }

    #[test]
    fn single_stubborn_node() {
        let g = Graph::empty(1).unwrap();
        let est = simulate_stubborn_coherence(&g, &StubbornnessProfile::identity(1), &SimulationConfig::default()).unwrap();
        assert_eq!(est.analytic, 0.5);
        assert!(est.z_score().abs() < 3.0, "{est:?}");
    }

    #[test]
    fn unstable_step_is_rejected() {
        let cfg = SimulationConfig { time_step: Some(1.5), ..Default::default() };
        // λ_max(K2) = 2, bound 1
        assert_eq!(
            simulate_consensus_coherence(&Graph::complete(2).unwrap(), &cfg),
            Err(SimulationError::UnstableStep { time_step: 1.5, bound: 1.0 })
        );
    }

    #[test]
    fn config_validation() {
        let cfg = SimulationConfig { trial_count: 1, ..Default::default() };
        assert!(matches!(cfg.resolve(1.0, 2.0), Err(SimulationError::InvalidConfig(_))));
        let cfg = SimulationConfig { sample_time: Some(0.0), ..Default::default() };
        assert!(matches!(cfg.resolve(1.0, 2.0), Err(SimulationError::InvalidConfig(_))));
        let r = SimulationConfig::default().resolve(0.5, 4.0).unwrap();
        assert_eq!(r.time_step, 0.0025);
        assert_eq!(r.burn_in_time, 20.0);
        assert_eq!(r.sample_time, 400.0);
    }

    #[test]
    fn disconnected_consensus_is_an_error() {
        let g = Graph::empty(2).unwrap();
        assert!(matches!(
            simulate_consensus_coherence(&g, &SimulationConfig::default()),
            Err(SimulationError::Coherence(CoherenceError::Disconnected { .. }))
        ));
    }

    #[test]
    fn deterministic_under_seed() {
        let g = Graph::path(3).unwrap();
        let cfg = SimulationConfig { trial_count: 4, sample_time: Some(20.0), rng_seed: 9, ..Default::default() };
        assert_eq!(simulate_consensus_coherence(&g, &cfg).unwrap(), simulate_consensus_coherence(&g, &cfg).unwrap());
    }

    #[test]
    fn csv_row_has_finite_z() {
        let g = Graph::complete(2).unwrap();
        let cfg = SimulationConfig { trial_count: 4, sample_time: Some(50.0), ..Default::default() };
        let est = simulate_consensus_coherence(&g, &cfg).unwrap();
        assert!(est.z_score().is_finite());
        assert_eq!(est.csv_row().split(',').count(), SimulationEstimate::csv_header().split(',').count());
    }
}
