use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use geopath_core::oracle::{run_suites, Suite, SuiteReport, VerifyTarget};
use geopath_core::solver::default_horizon;
use geopath_core::{solve_path, ManifoldModel, PathSolution, ProblemSpec, SolverConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::manifest::{ManifestError, RunManifest};
use crate::output::{mean_std, write_scaling, write_summary, RowOrder, ScalingRow, SummaryRow, Trajectory};

/// RNG stream reserved for sampling batch start points; path solves use
/// their index as the stream.
pub const START_SAMPLING_STREAM: u64 = u64::MAX;

/// Execution options shared by the solving commands.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub workers: usize,
    pub out: PathBuf,
    pub order: RowOrder,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions { workers: default_workers(), out: out.into(), order: RowOrder::Forward }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// One finished path solve.
#[derive(Clone, Debug)]
pub struct PathResult {
    pub id: usize,
    pub spec: ProblemSpec,
    pub solution: PathSolution,
    pub trajectory_file: Option<PathBuf>,
}

/// Per-path results of a `solve` or `batch` run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub paths: Vec<PathResult>,
    pub summary_file: PathBuf,
}

impl RunReport {
    pub fn all_converged(&self) -> bool {
        self.paths.iter().all(|p| p.solution.converged)
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.paths
            .iter()
            .map(|p| SummaryRow {
                path_id: p.id,
                u: p.solution.value,
                iterations: p.solution.iterations,
                converged: p.solution.converged,
                seconds: p.solution.wall_time,
            })
            .collect()
    }

    pub fn mean_iterations(&self) -> f64 {
        mean_std(&self.paths.iter().map(|p| p.solution.iterations as f64).collect::<Vec<_>>()).0
    }

    pub fn mean_seconds(&self) -> f64 {
        mean_std(&self.paths.iter().map(|p| p.solution.wall_time).collect::<Vec<_>>()).0
    }
}

fn horizon_for(manifest: &RunManifest, start: &DVector<f64>, goal: &DVector<f64>) -> Result<f64> {
    if let Some(h) = manifest.horizon {
        return Ok(h);
    }
    let h = default_horizon(start, goal, &manifest.manifold, &manifest.speed, manifest.config.dt, manifest.horizon_factor)?;
    log::warn!("no horizon given; using {h} ({}x the straight-segment travel time)", manifest.horizon_factor);
    Ok(h)
}

/// Solves every spec on a pool of `workers` threads. Path `i` draws its
/// initialization from RNG stream `i`, so results do not depend on the
/// number of workers.
pub fn solve_all(specs: &[ProblemSpec], config: &SolverConfig, workers: usize) -> Result<Vec<PathSolution>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let solutions = pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| {
                let cfg = SolverConfig { stream: i as u64, ..config.clone() };
                solve_path(spec, &cfg).with_context(|| format!("path {i}"))
            })
            .collect::<Vec<_>>()
    });
    solutions.into_iter().collect()
}

fn run_paths(manifest: &RunManifest, starts: Vec<DVector<f64>>, opts: &RunOptions) -> Result<RunReport> {
    let goal = manifest.require_goal()?.clone();
    let specs = starts
        .into_iter()
        .map(|start| {
            let horizon = horizon_for(manifest, &start, &goal)?;
            Ok(ProblemSpec::new(start, goal.clone(), horizon, manifest.manifold.clone(), manifest.speed.clone())?)
        })
        .collect::<Result<Vec<_>>>()?;
    let solutions = solve_all(&specs, &manifest.config, opts.workers)?;

    fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let mut paths = Vec::with_capacity(specs.len());
    for (id, (spec, solution)) in specs.into_iter().zip(solutions).enumerate() {
        let file = opts.out.join(format!("path_{id:03}.csv"));
        let traj = Trajectory::from_solution(&solution, &spec.manifold, opts.order);
        traj.write(BufWriter::new(create(&file)?))?;
        paths.push(PathResult { id, spec, solution, trajectory_file: Some(file) });
    }
    let summary_file = opts.out.join("summary.csv");
    let report = RunReport { paths, summary_file };
    write_summary(&report.summary_rows(), BufWriter::new(create(&report.summary_file)?))?;
    Ok(report)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Solves one path per `start` line of the manifest.
pub fn cmd_solve(manifest: &RunManifest, opts: &RunOptions) -> Result<RunReport> {
    if manifest.starts.is_empty() {
        return Err(ManifestError::Missing("start").into());
    }
    run_paths(manifest, manifest.starts.clone(), opts)
}

/// Start points drawn uniformly from the manifest box.
pub fn sample_starts(manifest: &RunManifest) -> Result<Vec<DVector<f64>>> {
    let count = manifest.count.ok_or(ManifestError::Missing("count"))?;
    let lo = manifest.box_lo.as_ref().ok_or(ManifestError::Missing("box_lo"))?;
    let hi = manifest.box_hi.as_ref().ok_or(ManifestError::Missing("box_hi"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(manifest.config.seed);
    rng.set_stream(START_SAMPLING_STREAM);
    Ok((0..count)
        .map(|_| DVector::from_fn(manifest.dim, |i, _| rng.random_range(lo[i]..hi[i])))
        .collect())
}

/// Solves `count` paths from random starts in the manifest box.
pub fn cmd_batch(manifest: &RunManifest, opts: &RunOptions) -> Result<RunReport> {
    let starts = sample_starts(manifest)?;
    run_paths(manifest, starts, opts)
}

/// Which side of the straight segment a planar path mostly lies on,
/// judged by the signed area between the path and the segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub fn routing_side(start: &DVector<f64>, goal: &DVector<f64>, forward_states: &[DVector<f64>]) -> Side {
    let d = goal - start;
    let area: f64 = forward_states
        .iter()
        .map(|x| {
            let r = x - start;
            d[0] * r[1] - d[1] * r[0]
        })
        .sum();
    if area >= 0.0 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Timing statistics for one dimension of a scaling run.
#[derive(Clone, Debug)]
pub struct ScalingPoint {
    pub row: ScalingRow,
    pub mean_value: f64,
    pub converged: usize,
    pub trials: usize,
}

/// Scaling experiment: the Gaussian bump `amplitude·exp(−|x|²)` with start
/// `(−0.9, −1, …, −1)` and goal `(1, …, 1)` in each requested dimension.
pub fn cmd_scaling(manifest: &RunManifest, dims: &[usize], trials: usize, opts: &RunOptions) -> Result<Vec<ScalingPoint>> {
    if dims.is_empty() {
        bail!("no dimensions requested");
    }
    if trials == 0 {
        bail!("trials must be at least 1");
    }
    let amplitude = manifest.amplitude.unwrap_or(2.0);
    let mut points = Vec::with_capacity(dims.len());
    for &n in dims {
        let mut start = DVector::from_element(n, -1.0);
        start[0] = -0.9;
        let goal = DVector::from_element(n, 1.0);
        let manifold = ManifoldModel::gaussian_at_origin(amplitude, n);
        let horizon = match manifest.horizon {
            Some(h) => h,
            None => default_horizon(&start, &goal, &manifold, &manifest.speed, manifest.config.dt, manifest.horizon_factor)?,
        };
        let spec = ProblemSpec::new(start, goal, horizon, manifold, manifest.speed.clone())?;
        let specs = vec![spec; trials];
        let sols = solve_all(&specs, &manifest.config, opts.workers)?;
        let times: Vec<f64> = sols.iter().map(|s| s.wall_time).collect();
        let (mean_s, std_s) = mean_std(&times);
        let values: Vec<f64> = sols.iter().map(|s| s.value).collect();
        points.push(ScalingPoint {
            row: ScalingRow { dim: n, mean_s, std_s },
            mean_value: mean_std(&values).0,
            converged: sols.iter().filter(|s| s.converged).count(),
            trials,
        });
    }
    fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let rows: Vec<ScalingRow> = points.iter().map(|p| p.row.clone()).collect();
    write_scaling(&rows, BufWriter::new(create(&opts.out.join("scaling.csv"))?))?;
    Ok(points)
}

/// Runs the requested oracle suites (all when `selected` is empty).
pub fn cmd_verify(selected: &[Suite], seed: u64, target: &VerifyTarget) -> Vec<SuiteReport> {
    let suites: &[Suite] = if selected.is_empty() { &Suite::ALL } else { selected };
    run_suites(suites, target, seed)
}
