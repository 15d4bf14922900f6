//! Deterministic threshold baseline: a candidate `D_n` is accepted at
//! threshold `υ` when every element-wise distance `d(X, σX)` is below `υ`.
//!
//! Classification at a single `υ` takes the largest accepted `n` provided
//! every accepted candidate divides it (the accepted set is then a chain of
//! subgroups), and is ambiguous otherwise. A robust window is a maximal run
//! of thresholds at which exactly one candidate is accepted; its endpoints
//! are the exact crossings, i.e. the maximal element-wise distances of the
//! winner and of the next candidate to be admitted.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::cloud::{format_float, PointCloud};
use crate::error::{Error, Result};
use crate::group::{DihedralGroup, GroupElement};
use crate::orbit::element_distances;
use crate::transport::TransportConfig;

pub const DEFAULT_GRID_POINTS: usize = 200;

/// Un-squared `d(X, σX)` per element, in enumeration order.
pub fn elementwise_distances(
    group: &DihedralGroup,
    cloud: &PointCloud,
    cfg: &TransportConfig,
) -> Result<Vec<(GroupElement, f64)>> {
    let elements = group.elements();
    let distances = element_distances(&elements, cloud, cfg)?;
    Ok(elements.into_iter().zip(distances).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateDistances {
    pub n: usize,
    pub distances: Vec<(GroupElement, f64)>,
    pub max_elementwise: f64,
}

/// Computes element-wise distances once per candidate.
pub fn candidate_distances(
    candidates: &[DihedralGroup],
    cloud: &PointCloud,
    cfg: &TransportConfig,
) -> Result<Vec<CandidateDistances>> {
    candidates
        .iter()
        .map(|g| {
            let distances = elementwise_distances(g, cloud, cfg)?;
            let max_elementwise = distances.iter().map(|&(_, d)| d).fold(0.0, f64::max);
            Ok(CandidateDistances { n: g.n(), distances, max_elementwise })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdOutcome {
    pub candidate_n: usize,
    pub max_elementwise: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    None,
    Group(usize),
    Ambiguous,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::None => f.write_str("none"),
            Classification::Group(n) => write!(f, "{n}"),
            Classification::Ambiguous => f.write_str("ambiguous"),
        }
    }
}

fn classify_accepted(accepted: &[usize]) -> Classification {
    let Some(&largest) = accepted.iter().max() else {
        return Classification::None;
    };
    if accepted.iter().all(|&n| largest % n == 0) {
        Classification::Group(largest)
    } else {
        Classification::Ambiguous
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdClassification {
    pub upsilon: f64,
    pub outcomes: Vec<ThresholdOutcome>,
    pub classification: Classification,
}

impl ThresholdClassification {
    pub fn accepted(&self) -> Vec<usize> {
        self.outcomes.iter().filter(|o| o.accepted).map(|o| o.candidate_n).collect()
    }
}

fn check_upsilon(upsilon: f64) -> Result<()> {
    if !(upsilon > 0.0 && upsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("threshold {upsilon} must be positive and finite")));
    }
    Ok(())
}

/// Classification at one threshold from precomputed distances.
pub fn classify_at(table: &[CandidateDistances], upsilon: f64) -> Result<ThresholdClassification> {
    check_upsilon(upsilon)?;
    let outcomes: Vec<ThresholdOutcome> = table
        .iter()
        .map(|c| ThresholdOutcome {
            candidate_n: c.n,
            max_elementwise: c.max_elementwise,
            accepted: c.max_elementwise < upsilon,
        })
        .collect();
    let accepted: Vec<usize> = outcomes.iter().filter(|o| o.accepted).map(|o| o.candidate_n).collect();
    Ok(ThresholdClassification { upsilon, classification: classify_accepted(&accepted), outcomes })
}

pub fn threshold_classify(
    candidates: &[DihedralGroup],
    cloud: &PointCloud,
    upsilon: f64,
    cfg: &TransportConfig,
) -> Result<ThresholdClassification> {
    check_upsilon(upsilon)?;
    classify_at(&candidate_distances(candidates, cloud, cfg)?, upsilon)
}

/// `points` log-spaced thresholds from half the smallest to twice the
/// largest per-candidate maximum distance.
pub fn default_grid(table: &[CandidateDistances], points: usize) -> Vec<f64> {
    let positive = || table.iter().map(|c| c.max_elementwise).filter(|m| *m > 0.0);
    let lo = positive().fold(f64::INFINITY, f64::min);
    let hi = positive().fold(0.0, f64::max);
    let (lo, hi) = if lo.is_finite() { (0.5 * lo, 2.0 * hi) } else { (1e-9, 1.0) };
    if points <= 1 {
        return vec![lo; points];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustWindow {
    /// Exclusive lower end: the winner's largest element-wise distance.
    pub lo: f64,
    /// Inclusive upper end: the next candidate's largest distance
    /// (infinite when no other candidate exists).
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub upsilon: f64,
    pub accepted: Vec<bool>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub candidates: Vec<usize>,
    pub max_elementwise: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub robust_windows: Vec<RobustWindow>,
}

impl SweepReport {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.upsilon).collect()
    }

    pub fn window_for(&self, n: usize) -> Option<&RobustWindow> {
        self.robust_windows.iter().find(|w| w.n == n)
    }

    /// `upsilon,accepted,classification`; `accepted` is one 0/1 digit per
    /// candidate in candidate order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["upsilon", "accepted", "classification"]).map_err(io)?;
        for row in &self.rows {
            let bitmap: String = row.accepted.iter().map(|&a| if a { '1' } else { '0' }).collect();
            w.write_record([format_float(row.upsilon), bitmap, row.classification.to_string()])
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sweep over an ascending, positive grid using precomputed distances.
pub fn sweep_table(table: &[CandidateDistances], grid: &[f64]) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("threshold grid is empty".into()));
    }
    if grid.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
        return Err(Error::InvalidConfig("thresholds must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("threshold grid must be strictly ascending".into()));
    }

    let mut rows = Vec::with_capacity(grid.len());
    let mut windows: Vec<RobustWindow> = Vec::new();
    let mut open: Option<usize> = None;
    for &upsilon in grid {
        let at = classify_at(table, upsilon)?;
        let accepted_ns = at.accepted();
        let unique = match accepted_ns.as_slice() {
            [n] => Some(*n),
            _ => None,
        };
        if unique != open {
            if let Some(n) = unique {
                windows.push(exact_window(table, n));
            }
            open = unique;
        }
        rows.push(SweepRow {
            upsilon,
            accepted: at.outcomes.iter().map(|o| o.accepted).collect(),
            classification: at.classification,
        });
    }

    Ok(SweepReport {
        candidates: table.iter().map(|c| c.n).collect(),
        max_elementwise: table.iter().map(|c| c.max_elementwise).collect(),
        rows,
        robust_windows: windows,
    })
}

fn exact_window(table: &[CandidateDistances], n: usize) -> RobustWindow {
    let lo = table.iter().find(|c| c.n == n).map_or(0.0, |c| c.max_elementwise);
    let hi = table
        .iter()
        .filter(|c| c.n != n)
        .map(|c| c.max_elementwise)
        .fold(f64::INFINITY, f64::min);
    RobustWindow { lo, hi, n }
}

pub fn threshold_sweep(
    candidates: &[DihedralGroup],
    cloud: &PointCloud,
    grid: &[f64],
    cfg: &TransportConfig,
) -> Result<SweepReport> {
    sweep_table(&candidate_distances(candidates, cloud, cfg)?, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{replicate_motif, sample_fundamental_domain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fake(maxima: &[(usize, f64)]) -> Vec<CandidateDistances> {
        maxima
            .iter()
            .map(|&(n, m)| CandidateDistances { n, distances: Vec::new(), max_elementwise: m })
            .collect()
    }

    #[test]
    fn classification_regimes() {
        let table = fake(&[(2, 0.5), (3, 0.2), (4, 0.6), (5, 0.7), (6, 0.4)]);
        assert_eq!(classify_at(&table, 0.1).unwrap().classification, Classification::None);
        assert_eq!(classify_at(&table, 0.3).unwrap().classification, Classification::Group(3));
        // {3, 6}: a subgroup chain, classified as the larger group
        assert_eq!(classify_at(&table, 0.45).unwrap().classification, Classification::Group(6));
        // {2, 3, 6}: still divides 6
        assert_eq!(classify_at(&table, 0.55).unwrap().classification, Classification::Group(6));
        // {2, 3, 4, 6}: 4 does not divide 6
        assert_eq!(classify_at(&table, 0.65).unwrap().classification, Classification::Ambiguous);
        assert!(classify_at(&table, 0.0).is_err());
    }

    #[test]
    fn sweep_windows_use_exact_crossings() {
        let table = fake(&[(2, 0.5), (3, 0.2), (4, 0.6)]);
        let grid: Vec<f64> = (1..=80).map(|i| i as f64 * 0.01).collect();
        let report = sweep_table(&table, &grid).unwrap();
        assert_eq!(report.robust_windows, vec![RobustWindow { lo: 0.2, hi: 0.5, n: 3 }]);
        assert_eq!(report.rows.len(), 80);

        let below = sweep_table(&table, &[0.05, 0.1, 0.15]).unwrap();
        assert!(below.robust_windows.is_empty());

        assert!(sweep_table(&table, &[]).is_err());
        assert!(sweep_table(&table, &[0.3, 0.2]).is_err());
        assert!(sweep_table(&table, &[-0.1, 0.2]).is_err());
    }

    #[test]
    fn accepted_sets_grow_with_threshold() {
        let table = fake(&[(2, 0.5), (3, 0.2), (4, 0.6), (6, 0.45)]);
        let grid = default_grid(&table, DEFAULT_GRID_POINTS);
        assert_eq!(grid.len(), 200);
        assert!((grid[0] - 0.1).abs() < 1e-12 && (grid[199] - 1.2).abs() < 1e-12);
        let report = sweep_table(&table, &grid).unwrap();
        for pair in report.rows.windows(2) {
            for (a, b) in pair[0].accepted.iter().zip(&pair[1].accepted) {
                assert!(!a | b);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let table = fake(&[(2, 0.5), (3, 0.2)]);
        let report = sweep_table(&table, &[0.1, 0.3, 0.6]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "upsilon,accepted,classification");
        assert!(lines[1].ends_with(",00,none"));
        assert!(lines[2].ends_with(",01,3"));
        assert!(lines[3].ends_with(",11,ambiguous"));
    }

    #[test]
    fn invariant_data_accepted_at_every_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cloud = replicate_motif(&sample_fundamental_domain(3, 5, (0.3, 1.0), &mut rng).unwrap(), 3).unwrap();
        let cfg = TransportConfig::default();
        let d3 = DihedralGroup::new(3).unwrap();
        let dist = elementwise_distances(&d3, &cloud, &cfg).unwrap();
        assert_eq!(dist.len(), 6);
        assert_eq!(dist[0].1, 0.0);
        assert!(dist.iter().all(|&(_, d)| d < 1e-9));
        for upsilon in [1e-6, 1e-3, 1.0] {
            let c = threshold_classify(&[d3], &cloud, upsilon, &cfg).unwrap();
            assert_eq!(c.classification, Classification::Group(3));
        }
    }
}
