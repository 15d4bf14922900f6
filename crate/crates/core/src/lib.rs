//! Dihedral symmetry detection for planar point clouds via optimal transport.
//!
//! A point cloud `X` is scored against each candidate `D_n` by the mean
//! squared Wasserstein-2 distance between `X` and its images under the group
//! elements. These orbit costs feed a Gibbs posterior over `n`, sampled by
//! Metropolis–Hastings or parallel tempering.

pub mod benchmark;
pub mod cloud;
pub mod datagen;
pub mod embedding;
pub mod error;
pub mod group;
pub mod inference;
pub mod orbit;
pub mod transport;

pub use benchmark::{threshold_classify, threshold_sweep, Classification, RobustWindow, SweepReport};
pub use cloud::{Point, PointCloud};
pub use datagen::{cg_trajectory, make_d12_dataset, CGParams, NoiseSpec, TrajectorySpec};
pub use embedding::{phase_embed, TimeSeries};
pub use error::{Error, Result};
pub use group::{DihedralGroup, ElementKind, GroupElement};
pub use inference::{
    exact_posterior, run_chain, run_mc3, InferenceConfig, PosteriorSummary, TemperatureLadder,
};
pub use orbit::{group_cost, occam_criterion, CostReport};
pub use transport::{wasserstein, TransportConfig, TransportResult};
