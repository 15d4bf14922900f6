//! Metropolis-coupled MCMC (parallel tempering) over the lattice.
//!
//! Chain `k` targets `exp(−β_k λ C)`. Every `swap_interval` iterations one
//! adjacent pair is chosen uniformly and offered a state exchange. Chain `k`
//! draws from ChaCha stream `k` of the master seed; swaps use stream
//! `chains`. A one-chain ladder therefore reproduces [`run_chain`] exactly.
//!
//! [`run_chain`]: super::run_chain

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chain::chain_rng;
use super::{
    mh_step, summarize, ChainRecord, ChainState, CloudCosts, CostCache, CostSource, InferenceConfig, MoveStats,
    PosteriorSummary,
};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::transport::TransportConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureLadder {
    /// Strictly decreasing, `betas[0] = 1`.
    pub betas: Vec<f64>,
    pub swap_interval: usize,
}

impl Default for TemperatureLadder {
    fn default() -> Self {
        TemperatureLadder::geometric(5, 0.5, 10).expect("default ladder is valid")
    }
}

impl TemperatureLadder {
    /// `β_k = ratio^k` for `k = 0..chains`.
    pub fn geometric(chains: usize, ratio: f64, swap_interval: usize) -> Result<Self> {
        if chains > 1 && !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidConfig(format!("ladder ratio {ratio} must lie in (0, 1)")));
        }
        let ladder = TemperatureLadder {
            betas: (0..chains).map(|k| ratio.powi(k as i32)).collect(),
            swap_interval,
        };
        ladder.validate()?;
        Ok(ladder)
    }

    pub fn single() -> Self {
        TemperatureLadder { betas: vec![1.0], swap_interval: 1 }
    }

    pub fn chains(&self) -> usize {
        self.betas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(format!("temperature ladder: {msg}")));
        if self.betas.is_empty() {
            return fail("needs at least one chain");
        }
        if self.betas[0] != 1.0 {
            return fail("first inverse temperature must be 1");
        }
        if self.betas.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
            return fail("inverse temperatures must lie in (0, 1]");
        }
        if self.betas.windows(2).any(|w| w[1] >= w[0]) {
            return fail("inverse temperatures must be strictly decreasing");
        }
        if self.swap_interval == 0 {
            return fail("swap interval must be at least 1");
        }
        Ok(())
    }
}

/// `min(1, exp((β_k − β_{k+1}) λ (C_k − C_{k+1})))` for exchanging the
/// states of rungs `k` and `k + 1`.
pub fn swap_probability(beta_k: f64, beta_next: f64, lambda: f64, cost_k: f64, cost_next: f64) -> f64 {
    let log_ratio = (beta_k - beta_next) * lambda * (cost_k - cost_next);
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperedRun {
    /// One record per rung, cold chain first.
    pub chains: Vec<ChainRecord>,
    pub swaps: MoveStats,
}

/// Parallel tempering; the summary describes the cold chain.
pub fn run_mc3_with<S: CostSource>(
    costs: S,
    cfg: &InferenceConfig,
    ladder: &TemperatureLadder,
) -> Result<(TemperedRun, PosteriorSummary)> {
    cfg.validate()?;
    ladder.validate()?;
    let k = ladder.chains();
    let mut cache = CostCache::new(costs, cfg.cache_costs);
    let mut rngs: Vec<_> = (0..k as u64).map(|s| chain_rng(cfg.seed, s)).collect();
    let mut swap_rng = chain_rng(cfg.seed, k as u64);
    let retained = cfg.iterations - cfg.burn_in;
    let mut records: Vec<ChainRecord> = ladder.betas.iter().map(|&b| ChainRecord::new(b, retained)).collect();
    let start = ChainState { n: cfg.n_min, cost: cache.get(cfg.n_min)? };
    let mut states = vec![start; k];
    let mut swaps = MoveStats::default();

    for i in 0..cfg.iterations {
        for c in 0..k {
            states[c] = mh_step(states[c], &mut cache, cfg, ladder.betas[c], &mut rngs[c], &mut records[c])?;
        }
        if k > 1 && (i + 1) % ladder.swap_interval == 0 {
            let a = swap_rng.random_range(0..k - 1);
            let p = swap_probability(ladder.betas[a], ladder.betas[a + 1], cfg.lambda, states[a].cost, states[a + 1].cost);
            let accepted = swap_rng.random::<f64>() < p;
            swaps.attempted += 1;
            if accepted {
                swaps.accepted += 1;
                states.swap(a, a + 1);
            } else {
                swaps.rejected += 1;
            }
        }
        if i >= cfg.burn_in {
            for (record, state) in records.iter_mut().zip(&states) {
                record.trace.push(state.n);
            }
        }
    }

    for record in records.iter_mut() {
        record.cost_cache = cache.values().clone();
    }
    let mut summary = summarize(&records[0], cfg)?;
    summary.diagnostics.swap_acceptance = swaps.rate();
    summary.diagnostics.swap_attempts = swaps.attempted;
    Ok((TemperedRun { chains: records, swaps }, summary))
}

pub fn run_mc3(
    cloud: &PointCloud,
    transport: &TransportConfig,
    cfg: &InferenceConfig,
    ladder: &TemperatureLadder,
) -> Result<(TemperedRun, PosteriorSummary)> {
    run_mc3_with(CloudCosts::new(cloud, *transport), cfg, ladder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{exact_posterior, run_chain_with, total_variation, TableCosts};

    fn costs() -> TableCosts {
        [(2, 0.020), (3, 0.004), (4, 0.016), (5, 0.030), (6, 0.006), (7, 0.040)].into_iter().collect()
    }

    #[test]
    fn ladder_validation() {
        let l = TemperatureLadder::default();
        assert_eq!(l.betas, vec![1.0, 0.5, 0.25, 0.125, 0.0625]);
        assert_eq!(l.swap_interval, 10);
        assert!(TemperatureLadder::geometric(3, 1.5, 10).is_err());
        assert!(TemperatureLadder::geometric(3, 0.5, 0).is_err());
        assert!(TemperatureLadder { betas: vec![0.9, 0.5], swap_interval: 1 }.validate().is_err());
        assert!(TemperatureLadder { betas: vec![1.0, 1.0], swap_interval: 1 }.validate().is_err());
        assert!(TemperatureLadder { betas: vec![], swap_interval: 1 }.validate().is_err());
    }

    #[test]
    fn equal_costs_always_swap() {
        assert_eq!(swap_probability(1.0, 0.5, 250.0, 0.1, 0.1), 1.0);
        // Hot chain holding the lower cost: the exchange is favourable.
        assert_eq!(swap_probability(1.0, 0.5, 250.0, 0.2, 0.1), 1.0);
        let p = swap_probability(1.0, 0.5, 100.0, 0.1, 0.2);
        assert!((p - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_rung_matches_plain_chain() {
        let cfg = InferenceConfig::new(200.0, 4000).with_lattice(2, 7).with_seed(9);
        let (plain, _) = run_chain_with(costs(), &cfg).unwrap();
        let (tempered, summary) = run_mc3_with(costs(), &cfg, &TemperatureLadder::single()).unwrap();
        assert_eq!(plain.trace, tempered.chains[0].trace);
        assert_eq!(tempered.swaps.attempted, 0);
        assert_eq!(summary.diagnostics.swap_acceptance, None);
    }

    #[test]
    fn cold_chain_matches_exact_posterior() {
        let cfg = InferenceConfig::new(200.0, 60_000).with_lattice(2, 7).with_seed(3);
        let (run, summary) = run_mc3_with(costs(), &cfg, &TemperatureLadder::default()).unwrap();
        let exact = exact_posterior(&costs(), &cfg).unwrap();
        let tv = total_variation(&summary.probs, &exact.probs);
        assert!(tv < 0.05, "tv = {tv}");
        assert_eq!(run.chains.len(), 5);
        assert_eq!(run.swaps.attempted, 6000);
        assert!(summary.diagnostics.swap_acceptance.unwrap() > 0.0);
    }
}
