use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dihedral_core::benchmark::{candidate_distances, default_grid, sweep_table, DEFAULT_GRID_POINTS};
use dihedral_core::cloud::format_float;
use dihedral_core::datagen::{make_motif_dataset, MotifSpec, NoiseMode};
use dihedral_core::embedding::gait::{load_selection, GaitSelection};
use dihedral_core::embedding::{average_cycles, load_series_csv};
use dihedral_core::inference::{run_chain_with, run_mc3_with, AcceptanceRates, CloudCosts, CostCache, Diagnostics};
use dihedral_core::{
    cg_trajectory, exact_posterior, phase_embed, CGParams, DihedralGroup, Error as CoreError, InferenceConfig, NoiseSpec,
    Point, PointCloud, RobustWindow, TemperatureLadder, TrajectorySpec, TransportConfig,
};
use serde::Serialize;
use serde_json::json;

use crate::args::{BenchmarkArgs, CgArgs, EmbedArgs, InferArgs, MotifArgs, Mode, TransportArgs};
use crate::error::CliError;

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::missing(flag))
}

/// Attaches the path to bare I/O errors coming out of the core loaders.
fn with_path<T>(path: &Path, r: dihedral_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        CoreError::Io(io) => CliError::io(path, io),
        other => other.into(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

/// `cloud.csv` → `cloud.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn save_cloud(cloud: &PointCloud, path: &Path) -> Result<(), CliError> {
    with_path(path, cloud.save_csv(path))
}

fn transport_config(a: &TransportArgs) -> Result<TransportConfig, CliError> {
    let base = TransportConfig::default();
    let cfg = TransportConfig { p: a.p.unwrap_or(base.p), tolerance: a.tolerance.unwrap_or(base.tolerance) };
    cfg.validate()?;
    Ok(cfg)
}

pub fn generate_cg(a: CgArgs, fallback_seed: Option<u64>) -> Result<(), CliError> {
    let out = required(a.out, "out")?;
    let seed = a.seed.or(fallback_seed).unwrap_or(0);
    let base = CGParams::d3_attractor();
    let params = CGParams {
        alpha: a.alpha.unwrap_or(base.alpha),
        beta: a.beta.unwrap_or(base.beta),
        gamma: a.gamma.unwrap_or(base.gamma),
        lambda_map: a.lambda_map.unwrap_or(base.lambda_map),
        n: a.n.unwrap_or(base.n),
        escape_radius: base.escape_radius,
    };
    let defaults = TrajectorySpec::default();
    let spec = TrajectorySpec {
        count: a.count.unwrap_or(defaults.count),
        z0: Point::new(a.z0_re.unwrap_or(defaults.z0.x), a.z0_im.unwrap_or(defaults.z0.y)),
        transient: a.transient.unwrap_or(defaults.transient),
        stride: a.stride.unwrap_or(defaults.stride),
        noise: NoiseSpec { sigma: a.sigma.unwrap_or(0.0), seed },
        mode: match a.mode {
            Some(Mode::Dynamical) => NoiseMode::Dynamical,
            _ => NoiseMode::Observational,
        },
    };
    let cloud = cg_trajectory(&params, &spec)?;
    save_cloud(&cloud, &out)?;
    let meta = json!({
        "generator": "cg",
        "seed": seed,
        "count": cloud.len(),
        "params": params,
        "trajectory": spec,
    });
    write_json(&sibling(&out, "meta.json"), &meta)?;
    println!("seed {seed}: wrote {} points to {}", cloud.len(), out.display());
    Ok(())
}

pub fn generate_motif(a: MotifArgs, fallback_seed: Option<u64>, d12: bool) -> Result<(), CliError> {
    let out = required(a.out, "out")?;
    let seed = a.seed.or(fallback_seed).unwrap_or(0);
    let defaults = MotifSpec::default();
    if d12 && a.n.is_some_and(|n| n != 12) {
        return Err(CliError::Config("`generate d12` fixes n = 12; use `generate motif` for other orders".into()));
    }
    let spec = MotifSpec {
        n: a.n.unwrap_or(defaults.n),
        motif_size: a.motif_size.unwrap_or(defaults.motif_size),
        radius_range: (a.radius_min.unwrap_or(defaults.radius_range.0), a.radius_max.unwrap_or(defaults.radius_range.1)),
        sigma: a.sigma.unwrap_or(defaults.sigma),
    };
    let cloud = make_motif_dataset(&spec, seed)?;
    save_cloud(&cloud, &out)?;
    let meta = json!({
        "generator": if d12 { "d12" } else { "motif" },
        "seed": seed,
        "count": cloud.len(),
        "motif": spec,
    });
    write_json(&sibling(&out, "meta.json"), &meta)?;
    println!("seed {seed}: wrote {} points to {}", cloud.len(), out.display());
    Ok(())
}

pub fn embed(a: EmbedArgs) -> Result<(), CliError> {
    let out = required(a.out, "out")?;
    let series = match (a.input, a.manifest) {
        (Some(input), None) => {
            let columns = with_path(&input, load_series_csv(&input))?;
            let picked: Vec<_> = columns
                .into_iter()
                .filter(|c| a.column.as_ref().is_none_or(|name| *name == c.name))
                .map(|c| c.series)
                .collect();
            if picked.is_empty() {
                return Err(CliError::Config(format!(
                    "{}: no column named `{}`",
                    input.display(),
                    a.column.unwrap_or_default()
                )));
            }
            average_cycles(&picked)?
        }
        (None, Some(manifest)) => {
            let mut selection = GaitSelection::new(required(a.condition, "condition")?);
            if let Some(subjects) = a.subjects {
                selection.subjects = subjects;
            }
            if let Some(joints) = a.joints {
                selection.joints = joints;
            }
            if let Some(leg) = a.leg {
                selection.leg = leg;
            }
            selection.column = a.column;
            with_path(&manifest, load_selection(&manifest, &selection))?
        }
        (Some(_), Some(_)) => return Err(CliError::Config("give either `--input` or `--manifest`, not both".into())),
        (None, None) => return Err(CliError::missing("input")),
    };
    let cloud = phase_embed(&series)?;
    save_cloud(&cloud, &out)?;
    println!("embedded {} samples to {}", cloud.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct EffectiveInfer<'a> {
    input: &'a Path,
    points: usize,
    mode: &'static str,
    inference: &'a InferenceConfig,
    transport: TransportConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<&'a TemperatureLadder>,
    thin: usize,
}

#[derive(Serialize)]
struct InferDoc<'a> {
    config: EffectiveInfer<'a>,
    map_estimate: usize,
    map_prob: f64,
    probs: &'a BTreeMap<usize, f64>,
    acceptance: Option<&'a AcceptanceRates>,
    diagnostics: &'a Diagnostics,
    costs: &'a BTreeMap<usize, f64>,
    trace_path: Option<&'a Path>,
    wall_clock_seconds: f64,
}

pub fn infer(a: InferArgs, fallback_seed: Option<u64>) -> Result<(), CliError> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let transport = transport_config(&a.transport)?;
    let iterations = a.iters.unwrap_or(20_000);
    let mut cfg = InferenceConfig::new(a.lambda.unwrap_or(250.0), iterations);
    cfg.n_min = a.n_min.unwrap_or(cfg.n_min);
    cfg.n_max = a.n_max.unwrap_or(cfg.n_max);
    cfg.burn_in = a.burn_in.unwrap_or(cfg.burn_in);
    cfg.local_move_prob = a.local_prob.unwrap_or(cfg.local_move_prob);
    cfg.seed = a.seed.or(fallback_seed).unwrap_or(0);
    cfg.validate()?;
    let thin = a.thin.unwrap_or(1);
    if thin == 0 {
        return Err(CliError::Config("`--thin` must be at least 1".into()));
    }
    let chains = a.chains.unwrap_or(1);
    let ladder = if chains > 1 {
        let default = TemperatureLadder::default();
        let ratio = a.ladder_ratio.unwrap_or(default.betas[1]);
        Some(TemperatureLadder::geometric(chains, ratio, a.swap_interval.unwrap_or(default.swap_interval))?)
    } else {
        None
    };
    if a.exact && ladder.is_some() {
        return Err(CliError::Config("`--exact` and `--chains` > 1 are exclusive".into()));
    }

    let cloud = with_path(&input, PointCloud::load_csv(&input))?;
    let source = CloudCosts::new(&cloud, transport);
    let start = Instant::now();
    let (summary, costs, trace) = if a.exact {
        let mut cache = CostCache::new(source, true);
        for n in cfg.lattice() {
            cache.get(n)?;
        }
        let costs = cache.values().clone();
        let table: dihedral_core::inference::TableCosts = costs.clone().into_iter().collect();
        (exact_posterior(&table, &cfg)?, costs, None)
    } else if let Some(ladder) = &ladder {
        let (run, summary) = run_mc3_with(source, &cfg, ladder)?;
        let cold = run.chains.into_iter().next().expect("ladder has a cold chain");
        (summary, cold.cost_cache, Some(cold.trace))
    } else {
        let (record, summary) = run_chain_with(source, &cfg)?;
        (summary, record.cost_cache, Some(record.trace))
    };
    let wall_clock = start.elapsed().as_secs_f64();

    let trace_path = match trace {
        Some(trace) => {
            let path = a.trace.unwrap_or_else(|| sibling(&out, "trace.csv"));
            write_trace(&path, &trace, cfg.burn_in, thin)?;
            Some(path)
        }
        None => None,
    };
    let mode = match (a.exact, &ladder) {
        (true, _) => "exact",
        (false, Some(_)) => "tempered",
        (false, None) => "chain",
    };
    let effective = EffectiveInfer {
        input: &input,
        points: cloud.len(),
        mode,
        inference: &cfg,
        transport,
        ladder: ladder.as_ref(),
        thin,
    };
    let doc = InferDoc {
        config: effective,
        map_estimate: summary.map_estimate,
        map_prob: summary.map_prob,
        probs: &summary.probs,
        acceptance: summary.acceptance.as_ref(),
        diagnostics: &summary.diagnostics,
        costs: &costs,
        trace_path: trace_path.as_deref(),
        wall_clock_seconds: wall_clock,
    };
    write_json(&out, &doc)?;
    println!("MAP n = {} (p = {:.4}); result in {}", summary.map_estimate, summary.map_prob, out.display());
    Ok(())
}

/// `iteration,n`, numbering iterations from the first one after burn-in.
fn write_trace(path: &Path, trace: &[usize], burn_in: usize, thin: usize) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(w, "iteration,n").map_err(io)?;
    for (i, n) in trace.iter().enumerate().step_by(thin) {
        writeln!(w, "{},{n}", burn_in + i).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[derive(Serialize)]
struct TruthReport {
    n: usize,
    window: Option<RobustWindow>,
    no_window: bool,
}

#[derive(Serialize)]
struct GridSummary {
    points: usize,
    min: Option<f64>,
    max: Option<f64>,
}

#[derive(Serialize)]
struct BenchSummary<'a> {
    input: &'a Path,
    points: usize,
    transport: TransportConfig,
    candidates: &'a [usize],
    max_elementwise: BTreeMap<usize, f64>,
    grid: GridSummary,
    robust_windows: &'a [RobustWindow],
    truth: Option<TruthReport>,
}

pub fn benchmark(a: BenchmarkArgs) -> Result<(), CliError> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let transport = transport_config(&a.transport)?;
    let (n_min, n_max) = (a.n_min.unwrap_or(2), a.n_max.unwrap_or(12));
    if n_min < 1 || n_min > n_max {
        return Err(CliError::Config(format!("candidate range [{n_min}, {n_max}] must satisfy 1 <= n_min <= n_max")));
    }
    if a.grid.is_some() && a.grid_points.is_some() {
        return Err(CliError::Config("`--grid` and `--grid-points` are exclusive".into()));
    }
    let grid_points = a.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    if grid_points < 2 {
        return Err(CliError::Config("`--grid-points` must be at least 2".into()));
    }

    let cloud = with_path(&input, PointCloud::load_csv(&input))?;
    let candidates = (n_min..=n_max).map(DihedralGroup::new).collect::<Result<Vec<_>, _>>()?;
    let table = candidate_distances(&candidates, &cloud, &transport)?;
    let grid = match a.grid {
        Some(g) => g.0,
        None => default_grid(&table, grid_points),
    };
    let report = sweep_table(&table, &grid)?;

    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let distances_path = out.join("distances.csv");
    let mut w = create(&distances_path)?;
    let io = |e| CliError::io(&distances_path, e);
    writeln!(w, "n,element,distance").map_err(io)?;
    for row in &table {
        for (g, d) in &row.distances {
            writeln!(w, "{},{g},{}", row.n, format_float(*d)).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;

    let sweep_path = out.join("sweep.csv");
    with_path(&sweep_path, report.write_csv(create(&sweep_path)?))?;

    let max_elementwise: BTreeMap<usize, f64> = table.iter().map(|r| (r.n, r.max_elementwise)).collect();
    let truth = a.truth.map(|n| {
        let window = report.window_for(n).copied();
        TruthReport { n, window, no_window: window.is_none() }
    });
    let summary = BenchSummary {
        input: &input,
        points: cloud.len(),
        transport,
        candidates: &report.candidates,
        max_elementwise,
        grid: GridSummary { points: grid.len(), min: grid.first().copied(), max: grid.last().copied() },
        robust_windows: &report.robust_windows,
        truth,
    };
    write_json(&out.join("summary.json"), &summary)?;
    for w in &report.robust_windows {
        println!("window n = {}: ({}, {}]", w.n, w.lo, w.hi);
    }
    if report.robust_windows.is_empty() {
        println!("no robust window");
    }
    Ok(())
}
