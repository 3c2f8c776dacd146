//! Acceptance suite: one PASS/FAIL line per criterion. Runs sequentially so
//! that timings are comparable.
//!
//! Criteria listed in `KNOWN_RED` are evaluated at full tolerance and still
//! print FAIL; the README explains why they do not pass. The process exits
//! with status 1 when any other criterion fails.

use std::process::ExitCode;

use geopath_core::geometry::{
    closed_form_factor_2d, cholesky_factor, manifold_arclength, metric_from_gradient, MetricFactor,
};
use geopath_core::oracle::{run_suites, Suite, SuiteReport, VerifyTarget};
use geopath_core::solver::default_horizon;
use geopath_core::{solve_path, ManifoldModel, PathSolution, ProblemSpec, SolverConfig, SpeedModel};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FLAT_DIM: usize = 10;
const FLAT_POINTS: usize = 10;
const FLAT_TOL: f64 = 4.0e-2;
const FLAT_HORIZON_FACTOR: f64 = 1.5;
const FLAT_START_SEED: u64 = 1001;

const BUMP_DIM: usize = 25;
const BUMP_RANGE: (f64, f64) = (10.8, 11.8);
const BUMP_HORIZON_FACTOR: f64 = 1.2;

const SINUSOID_PATHS: usize = 20;
const SINUSOID_HORIZON_FACTOR: f64 = 2.0;
const SINUSOID_START_SEED: u64 = 2002;

const EXPERIMENT_GD_STEPS: usize = 4;
const ORACLE_SEED: u64 = 0;
const SCALING_DIMS: [usize; 3] = [10, 20, 30];
const SCALING_TRIALS: usize = 3;
const SCALING_RATIO: f64 = 10.0;

/// Sinusoid convergence within the iteration budget, and arc-length
/// consistency of the slower sinusoid paths.
const KNOWN_RED: [usize; 2] = [3, 9];

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(id: usize, name: &'static str, passed: bool, detail: String) -> Self {
        let o = Outcome { id, name, passed, detail };
        println!("criterion {:>2} {} {}: {}", o.id, if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        o
    }
}

/// A solved path together with the quantities the geometry checks need.
struct Run {
    spec: ProblemSpec,
    solution: PathSolution,
}

impl Run {
    fn arclength(&self) -> f64 {
        manifold_arclength(&self.spec.manifold, &self.solution.states).expect("finite path")
    }

    fn arclength_gap(&self) -> f64 {
        (self.solution.value - self.arclength()).abs()
    }

    fn arclength_tolerance(&self) -> f64 {
        (2.0 * self.solution.dt).max(0.05 * self.solution.value)
    }
}

fn experiment_config() -> SolverConfig {
    SolverConfig { gd_steps: EXPERIMENT_GD_STEPS, ..SolverConfig::default() }
}

fn solve(start: DVector<f64>, goal: DVector<f64>, m: ManifoldModel, factor: f64, config: &SolverConfig) -> Run {
    let v = SpeedModel::unit();
    let horizon = default_horizon(&start, &goal, &m, &v, config.dt, factor).expect("positive speed");
    let spec = ProblemSpec::new(start, goal, horizon, m, v).expect("valid problem");
    let solution = solve_path(&spec, config).expect("solver does not diverge");
    Run { spec, solution }
}

fn bump_problem(n: usize) -> (DVector<f64>, DVector<f64>, ManifoldModel) {
    let mut start = DVector::from_element(n, -1.0);
    start[0] = -0.9;
    (start, DVector::from_element(n, 1.0), ManifoldModel::gaussian_at_origin(2.0, n))
}

fn max_perpendicular_deviation(points: &[DVector<f64>], a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let d = b - a;
    points
        .iter()
        .map(|x| {
            let s = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            (x - (a + &d * s)).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest deviation of each coordinate from its linear interpolant in time
/// between the start and the goal.
fn coordinate_deviations(run: &Run) -> Vec<f64> {
    let path = run.solution.forward_states();
    let steps = path.len() - 1;
    let (start, goal) = (&run.spec.start, &run.spec.goal);
    (0..start.len())
        .map(|d| {
            path.iter()
                .enumerate()
                .map(|(j, x)| {
                    let s = j as f64 / steps as f64;
                    (x[d] - (start[d] + (goal[d] - start[d]) * s)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

fn flat_accuracy() -> (Outcome, Vec<Run>) {
    let mut rng = ChaCha8Rng::seed_from_u64(FLAT_START_SEED);
    let config = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut all_converged = true;
    let runs: Vec<Run> = (0..FLAT_POINTS)
        .map(|_| {
            let start = DVector::from_fn(FLAT_DIM, |_, _| rng.random_range(-1.0..1.0));
            let run = solve(start, DVector::zeros(FLAT_DIM), ManifoldModel::flat(FLAT_DIM), FLAT_HORIZON_FACTOR, &config);
            worst = worst.max((run.solution.value - run.spec.start.norm()).abs());
            all_converged &= run.solution.converged;
            run
        })
        .collect();
    let outcome = Outcome::new(
        1,
        "flat 10-D accuracy",
        worst <= FLAT_TOL && all_converged,
        format!("worst |u - |x|| = {worst:.3e} (tol {FLAT_TOL:.1e}), converged {}/{FLAT_POINTS}", runs.iter().filter(|r| r.solution.converged).count()),
    );
    (outcome, runs)
}

fn gaussian_bump() -> (Outcome, Run) {
    let (start, goal, m) = bump_problem(BUMP_DIM);
    let run = solve(start, goal, m, BUMP_HORIZON_FACTOR, &experiment_config());
    let u = run.solution.value;
    let dev = coordinate_deviations(&run);
    let first_dominates = dev[1..].iter().all(|&d| dev[0] > d);
    let runner_up = dev[1..].iter().cloned().fold(0.0, f64::max);
    let outcome = Outcome::new(
        2,
        "25-D Gaussian bump value",
        (BUMP_RANGE.0..=BUMP_RANGE.1).contains(&u) && first_dominates && run.solution.converged,
        format!(
            "u = {u:.4} (range [{}, {}]), first-coordinate deviation {:.3} vs largest other {runner_up:.3}, {} iterations, {:.1} s",
            BUMP_RANGE.0, BUMP_RANGE.1, dev[0], run.solution.iterations, run.solution.wall_time
        ),
    );
    (outcome, run)
}

fn sinusoid_budget() -> (Outcome, Vec<Run>) {
    let mut rng = ChaCha8Rng::seed_from_u64(SINUSOID_START_SEED);
    let config = experiment_config();
    let goal = DVector::from_element(2, 1.0);
    let runs: Vec<Run> = (0..SINUSOID_PATHS)
        .map(|_| {
            let start = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            solve(start, goal.clone(), ManifoldModel::sinusoid(1.0), SINUSOID_HORIZON_FACTOR, &config)
        })
        .collect();
    let converged = runs.iter().filter(|r| r.solution.converged).count();
    let mean_iters = runs.iter().map(|r| r.solution.iterations as f64).sum::<f64>() / runs.len() as f64;
    let failures: Vec<String> = runs
        .iter()
        .filter(|r| !r.solution.converged)
        .map(|r| format!("({:.3}, {:.3}) change {:.2e}", r.spec.start[0], r.spec.start[1], r.solution.final_change))
        .collect();
    let mut detail = format!("converged {converged}/{SINUSOID_PATHS}, mean iterations {mean_iters:.0}");
    if !failures.is_empty() {
        detail.push_str(&format!("; not converged from {}", failures.join(", ")));
    }
    (Outcome::new(3, "sinusoid convergence budget", converged == SINUSOID_PATHS, detail), runs)
}

fn oracle_criterion(id: usize, name: &'static str, reports: &[SuiteReport]) -> Outcome {
    let detail = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" | ");
    Outcome::new(id, name, reports.iter().all(|r| r.passed), detail)
}

fn geometry_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let (mut recon, mut eig, mut closed): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..1000 {
        let n = 2 + i % 9;
        let g = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let a = metric_from_gradient(&g).expect("finite gradient");
        let l = cholesky_factor(&a).expect("positive definite");
        recon = recon.max((l.matrix() * l.matrix().transpose() - &a).amax());
        let mut values: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        let small = 1.0 / (1.0 + g.norm_squared());
        eig = eig.max((values[0] - small).abs());
        for v in &values[1..] {
            eig = eig.max((v - 1.0).abs());
        }
        if n == 2 {
            let c = closed_form_factor_2d(g[0], g[1]);
            closed = closed.max((c.matrix() - l.matrix()).amax());
        }
    }
    let tiny = DVector::from_fn(3, |i, _| if i == 0 { 1e-4 } else { 0.0 });
    let near_identity = (MetricFactor::from_gradient(&tiny).expect("finite").l.matrix()
        - nalgebra::DMatrix::<f64>::identity(3, 3))
    .norm();
    let passed = recon <= 1e-12 && eig <= 1e-10 && near_identity <= 1e-3 && closed <= 1e-12;
    Outcome::new(
        8,
        "Cholesky and metric geometry",
        passed,
        format!(
            "|LLᵀ - A| {recon:.1e}, eigenvalues {eig:.1e}, |L - I|_F at |∇M| = 1e-4 {near_identity:.1e}, 2-D closed form {closed:.1e}"
        ),
    )
}

fn flat_geometry_and_arclength(flat: &[Run], bump: &Run, sinusoid: &[Run]) -> Outcome {
    let straight = flat
        .iter()
        .filter(|r| r.solution.converged)
        .map(|r| max_perpendicular_deviation(&r.solution.states, &r.spec.goal, &r.spec.start))
        .fold(0.0, f64::max);
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let groups: [(&str, Vec<&Run>); 3] =
        [("flat", flat.iter().collect()), ("bump", vec![bump]), ("sinusoid", sinusoid.iter().collect())];
    for (label, runs) in groups {
        for (i, r) in runs.iter().enumerate().filter(|(_, r)| r.solution.converged) {
            checked += 1;
            let ratio = r.arclength_gap() / r.arclength_tolerance();
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.0 {
                violations.push(format!("{label} #{i}: u {:.3} vs length {:.3}", r.solution.value, r.arclength()));
            }
        }
    }
    let mut detail = format!(
        "max perpendicular deviation {straight:.3e} (tol 5e-2); arc length checked on {checked} converged runs, worst gap/tol {worst_ratio:.2}"
    );
    if !violations.is_empty() {
        detail.push_str(&format!("; outside tolerance: {}", violations.join(", ")));
    }
    Outcome::new(9, "flat-path geometry and arc-length consistency", straight <= 5e-2 && violations.is_empty(), detail)
}

fn scaling() -> Outcome {
    let config = experiment_config();
    let mut means = Vec::new();
    for n in SCALING_DIMS {
        let (start, goal, m) = bump_problem(n);
        let total: f64 = (0..SCALING_TRIALS)
            .map(|trial| {
                let cfg = SolverConfig { stream: trial as u64, ..config.clone() };
                solve(start.clone(), goal.clone(), m.clone(), BUMP_HORIZON_FACTOR, &cfg).solution.wall_time
            })
            .sum();
        means.push(total / SCALING_TRIALS as f64);
    }
    let ratio = means[means.len() - 1] / means[0];
    let table = SCALING_DIMS.iter().zip(&means).map(|(n, t)| format!("n={n}: {t:.2} s")).collect::<Vec<_>>().join(", ");
    Outcome::new(10, "dimensional scaling", ratio <= SCALING_RATIO, format!("{table}; ratio {ratio:.2} (bound {SCALING_RATIO})"))
}

fn determinism() -> Outcome {
    let m = ManifoldModel::sinusoid(1.0);
    let goal = DVector::from_element(2, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(SINUSOID_START_SEED + 1);
    let config = SolverConfig { max_iters: 3000, seed: 7, ..SolverConfig::default() };
    let specs: Vec<ProblemSpec> = (0..4)
        .map(|_| {
            let start = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            ProblemSpec::new(start, goal.clone(), 4.0, m.clone(), SpeedModel::unit()).expect("valid problem")
        })
        .collect();
    let batch = |workers: usize| -> Vec<PathSolution> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        pool.install(|| {
            specs
                .par_iter()
                .enumerate()
                .map(|(i, s)| solve_path(s, &SolverConfig { stream: i as u64, ..config.clone() }).expect("solve"))
                .collect()
        })
    };
    let same = |a: &[PathSolution], b: &[PathSolution]| {
        a.iter().zip(b).all(|(x, y)| {
            x.states == y.states && x.costates == y.costates && x.value.to_bits() == y.value.to_bits()
        })
    };
    let (one, again, three) = (batch(1), batch(1), batch(3));
    let repeat = same(&one, &again);
    let workers = same(&one, &three);
    Outcome::new(
        11,
        "determinism and worker independence",
        repeat && workers,
        format!("repeat run identical: {repeat}; 1 vs 3 workers identical: {workers}"),
    )
}

fn main() -> ExitCode {
    let target = VerifyTarget::default();
    let mut outcomes = Vec::new();
    let (flat, flat_runs) = flat_accuracy();
    outcomes.push(flat);
    let (bump, bump_run) = gaussian_bump();
    outcomes.push(bump);
    let (sin, sin_runs) = sinusoid_budget();
    outcomes.push(sin);
    outcomes.push(oracle_criterion(4, "Hamiltonian sphere oracle", &run_suites(&[Suite::Sphere, Suite::Identity], &target, ORACLE_SEED)));
    outcomes.push(oracle_criterion(5, "shrinkage prox optimality", &run_suites(&[Suite::Prox], &target, ORACLE_SEED)));
    outcomes.push(oracle_criterion(6, "gradient correctness", &run_suites(&[Suite::Gradients], &target, ORACLE_SEED)));
    outcomes.push(oracle_criterion(7, "prox displacement bound", &run_suites(&[Suite::Bound], &target, ORACLE_SEED)));
    outcomes.push(geometry_suite());
    outcomes.push(flat_geometry_and_arclength(&flat_runs, &bump_run, &sin_runs));
    outcomes.push(scaling());
    outcomes.push(determinism());

    outcomes.sort_by_key(|o| o.id);
    let label = |o: &Outcome| format!("{} ({})", o.id, o.name);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    let known: Vec<String> = outcomes.iter().filter(|o| !o.passed && KNOWN_RED.contains(&o.id)).map(label).collect();
    let unexpected: Vec<String> = outcomes.iter().filter(|o| !o.passed && !KNOWN_RED.contains(&o.id)).map(label).collect();
    let recovered: Vec<String> = outcomes.iter().filter(|o| o.passed && KNOWN_RED.contains(&o.id)).map(label).collect();
    if !known.is_empty() {
        println!("known red: {}", known.join(", "));
    }
    if !recovered.is_empty() {
        println!("known red but passing in this run: {}", recovered.join(", "));
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
