use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{ChainRecord, InferenceConfig, MoveStats};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AcceptanceRates {
    pub local: Option<f64>,
    pub jump: Option<f64>,
    pub overall: Option<f64>,
    pub local_moves: MoveStats,
    pub jump_moves: MoveStats,
}

impl AcceptanceRates {
    pub fn from_stats(local: MoveStats, jump: MoveStats) -> Self {
        AcceptanceRates {
            local: local.rate(),
            jump: jump.rate(),
            overall: local.merged(&jump).rate(),
            local_moves: local,
            jump_moves: jump,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Post-burn-in samples.
    pub trace_len: usize,
    /// Autocorrelation-adjusted sample count of the `n` trace.
    pub effective_sample_size: f64,
    /// Replica-exchange acceptance (tempered runs only).
    pub swap_acceptance: Option<f64>,
    pub swap_attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    /// Every lattice point, summing to one.
    pub probs: BTreeMap<usize, f64>,
    pub map_estimate: usize,
    pub map_prob: f64,
    pub acceptance: Option<AcceptanceRates>,
    pub diagnostics: Diagnostics,
}

impl PosteriorSummary {
    /// MAP ties go to the smaller `n`.
    pub(crate) fn from_probs(probs: BTreeMap<usize, f64>, acceptance: Option<AcceptanceRates>, diagnostics: Diagnostics) -> Self {
        let (map_estimate, map_prob) = probs
            .iter()
            .fold((0, f64::NEG_INFINITY), |best, (&n, &p)| if p > best.1 { (n, p) } else { best });
        PosteriorSummary { probs, map_estimate, map_prob, acceptance, diagnostics }
    }

    /// Total probability on a set of candidates.
    pub fn mass_on(&self, ns: &[usize]) -> f64 {
        ns.iter().filter_map(|n| self.probs.get(n)).sum()
    }
}

/// Visit frequencies of the retained trace over the whole lattice.
pub fn summarize(record: &ChainRecord, cfg: &InferenceConfig) -> Result<PosteriorSummary> {
    if record.trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut counts: BTreeMap<usize, u64> = cfg.lattice().map(|n| (n, 0)).collect();
    for &n in &record.trace {
        *counts.entry(n).or_insert(0) += 1;
    }
    let total = record.trace.len() as f64;
    let probs = counts.into_iter().map(|(n, c)| (n, c as f64 / total)).collect();
    let diagnostics = Diagnostics {
        trace_len: record.trace.len(),
        effective_sample_size: effective_sample_size(&record.trace),
        ..Default::default()
    };
    Ok(PosteriorSummary::from_probs(
        probs,
        Some(AcceptanceRates::from_stats(record.local, record.jump)),
        diagnostics,
    ))
}

/// Geyer's initial positive sequence estimator. A constant trace counts at
/// full length.
pub fn effective_sample_size(trace: &[usize]) -> f64 {
    let len = trace.len();
    if len < 4 {
        return len as f64;
    }
    let mean = trace.iter().map(|&n| n as f64).sum::<f64>() / len as f64;
    let centred: Vec<f64> = trace.iter().map(|&n| n as f64 - mean).collect();
    let variance = centred.iter().map(|d| d * d).sum::<f64>() / len as f64;
    if variance == 0.0 {
        return len as f64;
    }

    // Autocovariance by zero-padded FFT.
    let size = (2 * len).next_power_of_two();
    let mut buf: Vec<Complex64> = centred.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let rho = |lag: usize| buf[lag].re / (size as f64 * len as f64 * variance);

    let mut sum = 0.0;
    let mut lag = 1;
    while lag + 1 < len {
        let pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        lag += 2;
    }
    let tau = -1.0 + 2.0 * (rho(0) + sum);
    (len as f64 / tau.max(1e-12)).min(len as f64)
}
