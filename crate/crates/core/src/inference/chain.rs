use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{summarize, CloudCosts, CostCache, CostSource, InferenceConfig, PosteriorSummary};
use crate::cloud::PointCloud;
use crate::error::Result;
use crate::transport::TransportConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainState {
    pub n: usize,
    /// Cached `C(D_n, X)`.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Local,
    Jump,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MoveStats {
    pub attempted: u64,
    pub accepted: u64,
    pub rejected: u64,
}

impl MoveStats {
    fn record(&mut self, accepted: bool) {
        self.attempted += 1;
        if accepted {
            self.accepted += 1;
        } else {
            self.rejected += 1;
        }
    }

    pub fn rate(&self) -> Option<f64> {
        (self.attempted > 0).then(|| self.accepted as f64 / self.attempted as f64)
    }

    pub fn merged(&self, other: &MoveStats) -> MoveStats {
        MoveStats {
            attempted: self.attempted + other.attempted,
            accepted: self.accepted + other.accepted,
            rejected: self.rejected + other.rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRecord {
    /// Inverse temperature the chain ran at (1 for the cold chain).
    pub beta: f64,
    /// Visited `n` after each post-burn-in iteration.
    pub trace: Vec<usize>,
    pub local: MoveStats,
    pub jump: MoveStats,
    pub cost_cache: BTreeMap<usize, f64>,
}

impl ChainRecord {
    pub(crate) fn new(beta: f64, capacity: usize) -> Self {
        ChainRecord {
            beta,
            trace: Vec::with_capacity(capacity),
            local: MoveStats::default(),
            jump: MoveStats::default(),
            cost_cache: BTreeMap::new(),
        }
    }

    fn stats_mut(&mut self, kind: MoveKind) -> &mut MoveStats {
        match kind {
            MoveKind::Local => &mut self.local,
            MoveKind::Jump => &mut self.jump,
        }
    }
}

/// `min(1, exp(−β λ ΔC))` for a proposal raising the cost by `delta_cost`.
pub fn acceptance_probability(delta_cost: f64, lambda: f64, beta: f64) -> f64 {
    let log_ratio = -beta * lambda * delta_cost;
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

/// One Metropolis–Hastings transition at inverse temperature `beta`.
///
/// With probability `local_move_prob` proposes `n ± 1` (direction uniform);
/// otherwise a jump to a uniformly chosen other lattice point. Local
/// proposals that leave the lattice, and jumps on a one-point lattice, are
/// rejected in place but still counted as attempts. Both proposal kinds are
/// symmetric, so no Hastings correction applies.
pub fn mh_step<S: CostSource, R: Rng + ?Sized>(
    state: ChainState,
    costs: &mut CostCache<S>,
    cfg: &InferenceConfig,
    beta: f64,
    rng: &mut R,
    record: &mut ChainRecord,
) -> Result<ChainState> {
    let local = rng.random::<f64>() < cfg.local_move_prob;
    let (kind, proposal) = if local {
        let up = rng.random_bool(0.5);
        let target = if up { state.n.checked_add(1) } else { state.n.checked_sub(1) };
        (MoveKind::Local, target.filter(|n| cfg.contains(*n)))
    } else {
        let others = cfg.lattice_size() - 1;
        let target = (others > 0).then(|| {
            let pick = cfg.n_min + rng.random_range(0..others);
            if pick >= state.n {
                pick + 1
            } else {
                pick
            }
        });
        (MoveKind::Jump, target)
    };

    let Some(n_new) = proposal else {
        record.stats_mut(kind).record(false);
        return Ok(state);
    };

    let cost_new = costs.get(n_new)?;
    let alpha = acceptance_probability(cost_new - state.cost, cfg.lambda, beta);
    let accepted = rng.random::<f64>() < alpha;
    record.stats_mut(kind).record(accepted);
    Ok(if accepted { ChainState { n: n_new, cost: cost_new } } else { state })
}

pub(crate) fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Single chain at `β = 1`, started at `n_min`.
pub fn run_chain_with<S: CostSource>(costs: S, cfg: &InferenceConfig) -> Result<(ChainRecord, PosteriorSummary)> {
    cfg.validate()?;
    let mut cache = CostCache::new(costs, cfg.cache_costs);
    let mut rng = chain_rng(cfg.seed, 0);
    let mut record = ChainRecord::new(1.0, cfg.iterations - cfg.burn_in);
    let mut state = ChainState { n: cfg.n_min, cost: cache.get(cfg.n_min)? };

    for i in 0..cfg.iterations {
        state = mh_step(state, &mut cache, cfg, 1.0, &mut rng, &mut record)?;
        if i >= cfg.burn_in {
            record.trace.push(state.n);
        }
    }
    record.cost_cache = cache.values().clone();
    let summary = summarize(&record, cfg)?;
    Ok((record, summary))
}

pub fn run_chain(cloud: &PointCloud, transport: &TransportConfig, cfg: &InferenceConfig) -> Result<(ChainRecord, PosteriorSummary)> {
    run_chain_with(CloudCosts::new(cloud, *transport), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{exact_posterior, total_variation, TableCosts};

    fn table(costs: &[(usize, f64)]) -> TableCosts {
        costs.iter().copied().collect()
    }

    #[test]
    fn acceptance_examples() {
        assert_eq!(acceptance_probability(-0.3, 250.0, 1.0), 1.0);
        assert_eq!(acceptance_probability(0.0, 250.0, 1.0), 1.0);
        let p = acceptance_probability(0.01, 250.0, 1.0);
        assert!((p - (-2.5f64).exp()).abs() < 1e-15);
        assert!((p - 0.082_085).abs() < 1e-6);
        assert!((acceptance_probability(0.01, 250.0, 0.5) - (-1.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_point_lattice() {
        let cfg = InferenceConfig::new(250.0, 500).with_lattice(4, 4);
        let (record, summary) = run_chain_with(table(&[(4, 0.2)]), &cfg).unwrap();
        assert!(record.trace.iter().all(|&n| n == 4));
        assert_eq!(summary.map_estimate, 4);
        assert_eq!(record.local.accepted + record.jump.accepted, 0);
        assert_eq!(record.local.attempted + record.jump.attempted, 500);
    }

    #[test]
    fn boundary_moves_are_rejected_in_place() {
        // Every local move from n_min downward must be rejected.
        let cfg = InferenceConfig { local_move_prob: 1.0, ..InferenceConfig::new(1e6, 2000).with_lattice(2, 3) };
        let (record, _) = run_chain_with(table(&[(2, 0.0), (3, 1.0)]), &cfg).unwrap();
        assert!(record.trace.iter().all(|&n| n == 2));
        assert_eq!(record.local.attempted, 2000);
        assert_eq!(record.jump.attempted, 0);
        assert_eq!(record.local.accepted, 0);
    }

    #[test]
    fn deterministic_and_cache_transparent() {
        let costs = table(&[(2, 0.02), (3, 0.01), (4, 0.015), (5, 0.03)]);
        let cfg = InferenceConfig::new(100.0, 5000).with_lattice(2, 5).with_seed(42);
        let (a, _) = run_chain_with(&costs, &cfg).unwrap();
        let (b, _) = run_chain_with(&costs, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        let uncached = InferenceConfig { cache_costs: false, ..cfg.clone() };
        let (c, _) = run_chain_with(&costs, &uncached).unwrap();
        assert_eq!(a.trace, c.trace);
        let (d, _) = run_chain_with(&costs, &cfg.clone().with_seed(43)).unwrap();
        assert_ne!(a.trace, d.trace);
    }

    #[test]
    fn bookkeeping_adds_up() {
        let costs = table(&[(2, 0.02), (3, 0.01), (4, 0.015)]);
        let cfg = InferenceConfig::new(100.0, 3000).with_lattice(2, 4);
        let (r, _) = run_chain_with(&costs, &cfg).unwrap();
        for s in [r.local, r.jump] {
            assert_eq!(s.accepted + s.rejected, s.attempted);
        }
        assert_eq!(r.local.attempted + r.jump.attempted, 3000);
        assert_eq!(r.trace.len(), 2700);
    }

    #[test]
    fn frequencies_match_exact_posterior() {
        let costs = table(&[(2, 0.020), (3, 0.012), (4, 0.016), (5, 0.030), (6, 0.014)]);
        let cfg = InferenceConfig::new(150.0, 60_000).with_lattice(2, 6).with_seed(5);
        let (_, summary) = run_chain_with(&costs, &cfg).unwrap();
        let exact = exact_posterior(&costs, &cfg).unwrap();
        let tv = total_variation(&summary.probs, &exact.probs);
        assert!(tv < 0.05, "tv = {tv}");
    }
}
