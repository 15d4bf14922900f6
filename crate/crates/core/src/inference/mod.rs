//! Gibbs posterior over the dihedral lattice and its samplers.
//!
//! Under a uniform prior on `n ∈ [n_min, n_max]` the posterior is
//! `P(n | X) ∝ exp(−λ C(D_n, X))`. Costs are deterministic per `n`, so every
//! sampler here is a Markov chain on a finite state space whose stationary
//! law [`exact_posterior`] computes in closed form.

mod chain;
mod summary;
mod tempering;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::group::DihedralGroup;
use crate::orbit::group_cost;
use crate::transport::TransportConfig;

pub use chain::{acceptance_probability, mh_step, run_chain, run_chain_with, ChainRecord, ChainState, MoveKind, MoveStats};
pub use summary::{effective_sample_size, summarize, AcceptanceRates, Diagnostics, PosteriorSummary};
pub use tempering::{run_mc3, run_mc3_with, swap_probability, TemperatureLadder, TemperedRun};

/// Largest lattice [`exact_posterior`] will enumerate.
pub const EXACT_LATTICE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferenceConfig {
    /// Inverse temperature of the Gibbs posterior.
    pub lambda: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub iterations: usize,
    pub burn_in: usize,
    /// Probability of a `n ± 1` move; the remainder is a uniform jump.
    pub local_move_prob: f64,
    pub seed: u64,
    /// Memoize `C(n)` after first evaluation. Never changes results.
    #[serde(default = "default_true")]
    pub cache_costs: bool,
}

fn default_true() -> bool {
    true
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig::new(250.0, 20_000)
    }
}

impl InferenceConfig {
    /// Lattice `[2, 30]`, 95% local moves, burn-in of 10% of `iterations`.
    pub fn new(lambda: f64, iterations: usize) -> Self {
        InferenceConfig {
            lambda,
            n_min: 2,
            n_max: 30,
            iterations,
            burn_in: iterations / 10,
            local_move_prob: 0.95,
            seed: 0,
            cache_costs: true,
        }
    }

    pub fn with_lattice(mut self, n_min: usize, n_max: usize) -> Self {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn lattice_size(&self) -> usize {
        self.n_max + 1 - self.n_min
    }

    pub fn lattice(&self) -> std::ops::RangeInclusive<usize> {
        self.n_min..=self.n_max
    }

    pub fn contains(&self, n: usize) -> bool {
        self.lattice().contains(&n)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return fail(format!("lambda = {} must be positive and finite", self.lambda));
        }
        if self.n_min < 1 || self.n_min > self.n_max {
            return fail(format!("lattice [{}, {}] must satisfy 1 <= n_min <= n_max", self.n_min, self.n_max));
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if self.burn_in >= self.iterations {
            return fail(format!("burn-in {} must be below iterations {}", self.burn_in, self.iterations));
        }
        if !(0.0..=1.0).contains(&self.local_move_prob) {
            return fail(format!("local move probability {} outside [0, 1]", self.local_move_prob));
        }
        Ok(())
    }

    fn check_in_lattice(&self, n: usize) -> Result<()> {
        if !self.contains(n) {
            return Err(Error::OutOfLattice { n, n_min: self.n_min, n_max: self.n_max });
        }
        Ok(())
    }
}

/// Supplies `C(D_n, X)` for candidate orders.
pub trait CostSource {
    fn cost(&self, n: usize) -> Result<f64>;
}

/// Orbit costs of a concrete point cloud.
#[derive(Debug, Clone, Copy)]
pub struct CloudCosts<'a> {
    cloud: &'a PointCloud,
    transport: TransportConfig,
}

impl<'a> CloudCosts<'a> {
    pub fn new(cloud: &'a PointCloud, transport: TransportConfig) -> Self {
        CloudCosts { cloud, transport }
    }
}

impl CostSource for CloudCosts<'_> {
    fn cost(&self, n: usize) -> Result<f64> {
        Ok(group_cost(&DihedralGroup::new(n)?, self.cloud, &self.transport)?.mean_cost)
    }
}

/// Precomputed costs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableCosts(pub BTreeMap<usize, f64>);

impl FromIterator<(usize, f64)> for TableCosts {
    fn from_iter<I: IntoIterator<Item = (usize, f64)>>(iter: I) -> Self {
        TableCosts(iter.into_iter().collect())
    }
}

impl CostSource for TableCosts {
    fn cost(&self, n: usize) -> Result<f64> {
        self.0
            .get(&n)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("no tabulated cost for n = {n}")))
    }
}

impl<S: CostSource + ?Sized> CostSource for &S {
    fn cost(&self, n: usize) -> Result<f64> {
        (**self).cost(n)
    }
}

/// Optional memoization in front of a [`CostSource`].
#[derive(Debug)]
pub struct CostCache<S> {
    source: S,
    enabled: bool,
    values: BTreeMap<usize, f64>,
    evaluations: usize,
}

impl<S: CostSource> CostCache<S> {
    pub fn new(source: S, enabled: bool) -> Self {
        CostCache { source, enabled, values: BTreeMap::new(), evaluations: 0 }
    }

    pub fn get(&mut self, n: usize) -> Result<f64> {
        if self.enabled {
            if let Some(&c) = self.values.get(&n) {
                return Ok(c);
            }
        }
        let c = self.source.cost(n)?;
        self.evaluations += 1;
        self.values.insert(n, c);
        Ok(c)
    }

    /// Number of calls that reached the underlying source.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Every cost seen so far.
    pub fn values(&self) -> &BTreeMap<usize, f64> {
        &self.values
    }
}

/// `−λ C(D_n, X)`; the uniform prior is an omitted constant.
pub fn log_unnormalized_posterior<S: CostSource>(n: usize, costs: &S, cfg: &InferenceConfig) -> Result<f64> {
    cfg.check_in_lattice(n)?;
    Ok(-cfg.lambda * costs.cost(n)?)
}

/// Normalized `exp(−λ C_n)` over the whole lattice (max-subtracted).
pub fn exact_posterior<S: CostSource>(costs: &S, cfg: &InferenceConfig) -> Result<PosteriorSummary> {
    cfg.validate()?;
    if cfg.lattice_size() > EXACT_LATTICE_LIMIT {
        return Err(Error::LatticeTooLarge { size: cfg.lattice_size(), limit: EXACT_LATTICE_LIMIT });
    }
    let logs = cfg
        .lattice()
        .map(|n| Ok((n, log_unnormalized_posterior(n, costs, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let peak = logs.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<(usize, f64)> = logs.iter().map(|&(n, l)| (n, (l - peak).exp())).collect();
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    let probs = weights.into_iter().map(|(n, w)| (n, w / total)).collect();
    Ok(PosteriorSummary::from_probs(probs, None, Diagnostics::default()))
}

/// Total-variation distance between two distributions on the lattice.
pub fn total_variation(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    let keys: std::collections::BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(&k).unwrap_or(&0.0) - b.get(&k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}
