//! Exact p-Wasserstein distance between equal-size uniform empirical measures.
//!
//! With uniform weights and equal cardinality an optimal plan can be taken
//! at a vertex of the doubly-stochastic polytope, i.e. a permutation scaled
//! by `1/N`, so the problem reduces to linear assignment on the matrix of
//! `‖x_i − y_j‖^p`.

mod assignment;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Largest size accepted by [`brute_force_wasserstein`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportConfig {
    /// Wasserstein order, `p >= 1`.
    pub p: f64,
    /// Absolute tolerance for cost comparisons.
    pub tolerance: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig { p: 2.0, tolerance: 1e-9 }
    }
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidConfig(format!("Wasserstein order p = {} must be >= 1", self.p)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        Ok(())
    }
}

/// Optimal pairing and its cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    /// `assignment[i] = j` sends source point `i` to target point `j`.
    pub assignment: Vec<usize>,
    /// `Σ_i ‖x_i − y_{π(i)}‖^p / N`.
    pub total_cost: f64,
    /// `total_cost^{1/p}`.
    pub distance: f64,
}

/// Dense row-major `N x N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Summed cost of a pairing, accumulated in source order.
    pub fn pairing_cost(&self, assignment: &[usize]) -> f64 {
        assignment.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

fn check_sizes(x: &PointCloud, y: &PointCloud) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch { left: x.len(), right: y.len() });
    }
    Ok(())
}

/// Entry `(i, j)` is `‖x_i − y_j‖^p`.
pub fn cost_matrix(x: &PointCloud, y: &PointCloud, p: f64) -> Result<CostMatrix> {
    check_sizes(x, y)?;
    let n = x.len();
    let mut data = Vec::with_capacity(n * n);
    for (row, a) in x.iter().enumerate() {
        for (col, b) in y.iter().enumerate() {
            let sq = a.dist_sq(*b);
            let c = if p == 2.0 { sq } else { sq.powf(p / 2.0) };
            if !c.is_finite() {
                return Err(Error::CostOverflow { row, col });
            }
            data.push(c);
        }
    }
    Ok(CostMatrix { n, data })
}

fn finish(matrix: &CostMatrix, assignment: Vec<usize>, p: f64) -> TransportResult {
    let total_cost = matrix.pairing_cost(&assignment) / matrix.n as f64;
    let distance = if p == 2.0 { total_cost.sqrt() } else { total_cost.powf(1.0 / p) };
    TransportResult { assignment, total_cost, distance }
}

/// Exact optimal transport via linear assignment.
pub fn wasserstein(x: &PointCloud, y: &PointCloud, cfg: &TransportConfig) -> Result<TransportResult> {
    cfg.validate()?;
    let matrix = cost_matrix(x, y, cfg.p)?;
    let assignment = assignment::solve(matrix.n, &matrix.data);
    Ok(finish(&matrix, assignment, cfg.p))
}

/// Exhaustive minimum over all `N!` pairings (`N <= 8`). Validation oracle.
pub fn brute_force_wasserstein(x: &PointCloud, y: &PointCloud, cfg: &TransportConfig) -> Result<TransportResult> {
    cfg.validate()?;
    check_sizes(x, y)?;
    if x.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit { size: x.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let matrix = cost_matrix(x, y, cfg.p)?;
    let n = matrix.n;

    // Heap's algorithm, iterative form.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = matrix.pairing_cost(&perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let cost = matrix.pairing_cost(&perm);
            if cost < best_cost {
                best_cost = cost;
                best.copy_from_slice(&perm);
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(finish(&matrix, best, cfg.p))
}
