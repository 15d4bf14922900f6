//! Group-orbit cost: mean squared Wasserstein distance between a cloud and
//! its images under every element of a candidate group.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::cloud::{format_float, PointCloud};
use crate::error::{Error, Result};
use crate::group::{apply_element, DihedralGroup, GroupElement};
use crate::transport::{wasserstein, TransportConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementCost {
    pub element: GroupElement,
    /// `d(X, σX)^2`.
    pub squared_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub group_n: usize,
    pub per_element: Vec<ElementCost>,
    pub mean_cost: f64,
}

impl CostReport {
    /// Writes `element,squared_distance` rows.
    pub fn write_records<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["n", "element", "squared_distance"]).map_err(io)?;
        for entry in &self.per_element {
            w.write_record([
                self.group_n.to_string(),
                entry.element.to_string(),
                format_float(entry.squared_distance),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `d(X, σX)` for each element, in input order. Solves run in parallel.
pub fn element_distances(elements: &[GroupElement], cloud: &PointCloud, cfg: &TransportConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    elements
        .par_iter()
        .map(|g| {
            let image = apply_element(g, cloud);
            wasserstein(cloud, &image, cfg).map(|r| r.distance)
        })
        .collect()
}

fn squared_distances(elements: &[GroupElement], cloud: &PointCloud, cfg: &TransportConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    elements
        .par_iter()
        .map(|g| {
            let image = apply_element(g, cloud);
            let r = wasserstein(cloud, &image, cfg)?;
            Ok(if cfg.p == 2.0 { r.total_cost } else { r.distance * r.distance })
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean of `d(X, σX)^2` over an arbitrary element set.
pub fn element_set_cost(elements: &[GroupElement], cloud: &PointCloud, cfg: &TransportConfig) -> Result<f64> {
    if elements.is_empty() {
        return Err(Error::InvalidConfig("element set must be nonempty".into()));
    }
    Ok(mean(&squared_distances(elements, cloud, cfg)?))
}

/// `C(D_n, X)` with the per-element breakdown. The identity is included.
pub fn group_cost(group: &DihedralGroup, cloud: &PointCloud, cfg: &TransportConfig) -> Result<CostReport> {
    let elements = group.elements();
    let squared = squared_distances(&elements, cloud, cfg)?;
    let mean_cost = mean(&squared);
    let per_element = elements
        .into_iter()
        .zip(squared)
        .map(|(element, squared_distance)| ElementCost { element, squared_distance })
        .collect();
    Ok(CostReport { group_n: group.n(), per_element, mean_cost })
}

/// Both sides of the subgroup comparison for `D_s < D_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccamComparison {
    /// Mean squared distance over the elements of the smaller group.
    pub lhs: f64,
    /// Mean squared distance over the elements of the larger group not in
    /// the smaller one.
    pub rhs: f64,
    /// `lhs < rhs` by more than the configured tolerance.
    pub simpler_preferred: bool,
}

/// Compares the smaller group's average against the average over the extra
/// elements of the larger group. `simpler_preferred` holds exactly when
/// `C(D_s, X) < C(D_l, X)` (up to tolerance).
pub fn occam_criterion(
    small: &DihedralGroup,
    large: &DihedralGroup,
    cloud: &PointCloud,
    cfg: &TransportConfig,
) -> Result<OccamComparison> {
    if small.n() == large.n() || !small.is_subgroup_of(large) {
        return Err(Error::NotASubgroup { small: small.n(), large: large.n() });
    }
    let step = large.n() / small.n();
    let report = group_cost(large, cloud, cfg)?;
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for entry in &report.per_element {
        if entry.element.index() % step == 0 {
            inside.push(entry.squared_distance);
        } else {
            outside.push(entry.squared_distance);
        }
    }
    debug_assert_eq!(inside.len(), small.order());
    let lhs = mean(&inside);
    let rhs = mean(&outside);
    Ok(OccamComparison { lhs, rhs, simpler_preferred: rhs - lhs > cfg.tolerance })
}

/// Upper bound `4Md + 4d^2` on `|C(Σ, X) − C(Σ, Y)|` when `d = W_2(X, Y)`
/// and every `d(X, σX) <= M`. Both arguments must be nonnegative.
pub fn stability_bound(max_distance: f64, perturbation: f64) -> f64 {
    debug_assert!(max_distance >= 0.0 && perturbation >= 0.0);
    4.0 * max_distance * perturbation + 4.0 * perturbation * perturbation
}
