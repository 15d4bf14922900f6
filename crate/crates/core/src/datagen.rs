//! Synthetic datasets: trajectories of the `D_n`-equivariant
//! Chossat–Golubitsky map and motif-replicated dihedral clouds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};
use crate::group::{replicate_motif, sample_fundamental_domain};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;

/// Parameters of `f(z) = (α|z|² + β Re(zⁿ) + λ) z + γ z̄ⁿ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CGParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// The map's own λ, unrelated to the posterior sharpness.
    pub lambda_map: f64,
    pub n: usize,
    #[serde(default = "default_escape_radius")]
    pub escape_radius: f64,
}

fn default_escape_radius() -> f64 {
    DEFAULT_ESCAPE_RADIUS
}

impl CGParams {
    /// `α = 1, β = 0, γ = 0.5, λ = −1.804, n = 3`: a chaotic attractor with
    /// `D_3` symmetry.
    pub fn d3_attractor() -> Self {
        CGParams {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.5,
            lambda_map: -1.804,
            n: 3,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("map order n = {} must be >= 2", self.n)));
        }
        let finite = [self.alpha, self.beta, self.gamma, self.lambda_map]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("map parameters must be finite".into()));
        }
        if !(self.escape_radius > 0.0) {
            return Err(Error::InvalidConfig("escape radius must be positive".into()));
        }
        Ok(())
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let n = self.n as u32;
        let zn = z.powu(n);
        let factor = self.alpha * z.norm_sqr() + self.beta * zn.re + self.lambda_map;
        z * factor + z.conj().powu(n - 1) * self.gamma
    }
}

/// Isotropic Gaussian noise, standard deviation `sigma` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { sigma: 0.0, seed: 0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("noise sigma {} must be >= 0", self.sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Added to recorded points only.
    #[default]
    Observational,
    /// Added after every map application, `x_{k+1} = f(x_k) + ε_k`.
    Dynamical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySpec {
    pub count: usize,
    pub z0: Point,
    pub transient: usize,
    /// Record every `stride`-th iterate after the transient.
    pub stride: usize,
    pub noise: NoiseSpec,
    pub mode: NoiseMode,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec {
            count: 150,
            z0: Point::new(0.1, 0.1),
            transient: 1000,
            stride: 1,
            noise: NoiseSpec::none(),
            mode: NoiseMode::Observational,
        }
    }
}

fn to_complex(p: Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

fn to_point(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

fn checked(z: Complex64, escape_radius: f64, iterate: usize) -> Result<Complex64> {
    let modulus = z.norm();
    if !(modulus <= escape_radius) {
        return Err(Error::Divergence { iterate, modulus });
    }
    Ok(z)
}

/// One application of the map.
pub fn cg_step(z: Point, params: &CGParams) -> Result<Point> {
    let next = params.eval(to_complex(z));
    checked(next, params.escape_radius, 1).map(to_point)
}

fn gaussian(sigma: f64) -> Option<Normal<f64>> {
    (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("sigma validated"))
}

/// Iterates from `z0`, drops `transient` iterates, then records `count`
/// iterates spaced `stride` apart. Divergence reports the 1-based index of
/// the offending iterate.
pub fn cg_trajectory(params: &CGParams, spec: &TrajectorySpec) -> Result<PointCloud> {
    params.validate()?;
    spec.noise.validate()?;
    if spec.count == 0 {
        return Err(Error::InvalidConfig("trajectory count must be at least 1".into()));
    }
    if spec.stride == 0 {
        return Err(Error::InvalidConfig("trajectory stride must be at least 1".into()));
    }
    if !spec.z0.is_finite() {
        return Err(Error::InvalidConfig("initial condition must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.noise.seed);
    let normal = gaussian(spec.noise.sigma);
    let dynamical = spec.mode == NoiseMode::Dynamical;

    let mut z = to_complex(spec.z0);
    let mut points = Vec::with_capacity(spec.count);
    let last = spec.transient + (spec.count - 1) * spec.stride + 1;
    for iterate in 1..=last {
        z = params.eval(z);
        if dynamical {
            if let Some(normal) = &normal {
                z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            }
        }
        z = checked(z, params.escape_radius, iterate)?;
        if iterate > spec.transient && (iterate - spec.transient - 1) % spec.stride == 0 {
            points.push(to_point(z));
        }
    }
    let cloud = PointCloud::new(points)?;
    match (dynamical, normal) {
        (false, Some(normal)) => Ok(perturb(&cloud, &normal, &mut rng)),
        _ => Ok(cloud),
    }
}

fn perturb<R: Rng + ?Sized>(cloud: &PointCloud, normal: &Normal<f64>, rng: &mut R) -> PointCloud {
    let points = cloud
        .iter()
        .map(|p| Point::new(p.x + normal.sample(rng), p.y + normal.sample(rng)))
        .collect();
    PointCloud::from_valid(points)
}

/// Independent Gaussian perturbation of every coordinate, order preserved.
pub fn add_noise(cloud: &PointCloud, noise: &NoiseSpec) -> Result<PointCloud> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    Ok(add_noise_with(cloud, noise.sigma, &mut rng))
}

fn add_noise_with<R: Rng + ?Sized>(cloud: &PointCloud, sigma: f64, rng: &mut R) -> PointCloud {
    match gaussian(sigma) {
        Some(normal) => perturb(cloud, &normal, rng),
        None => cloud.clone(),
    }
}

/// A noisy `D_n`-invariant cloud built from a random motif.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotifSpec {
    pub n: usize,
    pub motif_size: usize,
    pub radius_range: (f64, f64),
    pub sigma: f64,
}

impl Default for MotifSpec {
    fn default() -> Self {
        MotifSpec {
            n: 12,
            motif_size: 8,
            radius_range: (1.0, 4.0),
            sigma: 0.05,
        }
    }
}

/// Samples the motif, replicates it under `D_n`, then adds noise, all from
/// one stream seeded by `seed`.
pub fn make_motif_dataset(spec: &MotifSpec, seed: u64) -> Result<PointCloud> {
    NoiseSpec { sigma: spec.sigma, seed }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let motif = sample_fundamental_domain(spec.n, spec.motif_size, spec.radius_range, &mut rng)?;
    let clean = replicate_motif(&motif, spec.n)?;
    Ok(add_noise_with(&clean, spec.sigma, &mut rng))
}

/// 8 motif points in the `D_12` sector, replicated to 192, noise σ = 0.05.
pub fn make_d12_dataset(seed: u64) -> PointCloud {
    make_motif_dataset(&MotifSpec::default(), seed).expect("default motif spec is valid")
}
