//! Randomized verification suites comparing the closed-form Hamiltonian
//! machinery against the brute-force references of this module.

use std::fmt;
use std::str::FromStr;

use nalgebra::{dvector, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    angular_distance, closed_form_minimizer, closed_form_minimizer_from_gradient, fd_gradient, numeric_prox,
    sphere_min_objective, sphere_objective, NestedGrid, SphereSample,
};
use crate::error::Error;
use crate::geometry::{ManifoldModel, MetricFactor};
use crate::hamiltonian::{
    grad_x_hamiltonian, hamiltonian, indicated_hamiltonian, metric_norm, prox_costate_factored,
    prox_displacement_bound, IndicatorParams, SpeedModel,
};

/// Signature of a Hamiltonian `H(x, p, t)` under test.
pub type HamiltonianFn = fn(&ManifoldModel, &SpeedModel, &DVector<f64>, &DVector<f64>, f64) -> f64;

/// The implementation checked by the sphere suite. Swapping in a faulty
/// Hamiltonian must make that suite fail.
#[derive(Clone, Copy)]
pub struct VerifyTarget {
    pub hamiltonian: HamiltonianFn,
}

impl Default for VerifyTarget {
    fn default() -> Self {
        VerifyTarget { hamiltonian }
    }
}

impl fmt::Debug for VerifyTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerifyTarget").finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Closed-form `H` and minimizer against sphere brute force.
    Sphere,
    /// Shrinkage costate prox against random candidates and grid search.
    Prox,
    /// State gradient of `𝟙·H` against central differences.
    Gradients,
    /// `f(a*) + √(pᵀAp) = 0` and `|a*| = 1` for the closed-form minimizer.
    Identity,
    /// State-prox displacement bound against grid-searched prox points.
    Bound,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Sphere, Suite::Prox, Suite::Gradients, Suite::Identity, Suite::Bound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sphere => "sphere",
            Suite::Prox => "prox",
            Suite::Gradients => "gradients",
            Suite::Identity => "identity",
            Suite::Bound => "bound",
        }
    }

    pub fn run(self, target: &VerifyTarget, seed: u64) -> SuiteReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self as u64);
        match self {
            Suite::Sphere => sphere_suite(target, &mut rng),
            Suite::Prox => prox_suite(&mut rng),
            Suite::Gradients => gradient_suite(&mut rng),
            Suite::Identity => identity_suite(&mut rng),
            Suite::Bound => bound_suite(&mut rng),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| Error::parse(s, "unknown suite; expected sphere, prox, gradients, identity or bound"))
    }
}

/// Outcome of one suite: the worst error observed against its tolerance.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {:<4} instances={:<6} worst={:.3e} tol={:.2e}  {}",
            self.suite.name(),
            if self.passed { "PASS" } else { "FAIL" },
            self.instances,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

pub fn run_suites(suites: &[Suite], target: &VerifyTarget, seed: u64) -> Vec<SuiteReport> {
    suites.iter().map(|s| s.run(target, seed)).collect()
}

fn uniform(n: usize, r: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-r..r))
}

fn surfaces() -> Vec<(&'static str, ManifoldModel)> {
    vec![
        ("flat2", ManifoldModel::flat(2)),
        ("sin1", ManifoldModel::sinusoid(1.0)),
        ("sin3", ManifoldModel::sinusoid(3.0)),
        ("gauss2", ManifoldModel::gaussian_at_origin(2.0, 2)),
        ("gauss3", ManifoldModel::gaussian(2.0, dvector![0.2, -0.1, 0.3])),
    ]
}

pub const SPHERE_INSTANCES: usize = 100;
pub const SPHERE_VALUE_TOL: f64 = 1e-3;
pub const SPHERE_ANGLE_TOL: f64 = 1e-2;

fn sphere_suite(target: &VerifyTarget, rng: &mut ChaCha8Rng) -> SuiteReport {
    let speeds = [SpeedModel::unit(), SpeedModel::quadratic_left(), SpeedModel::constant(1.5)];
    let mut worst_value: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    let mut dominance_violations = 0usize;
    let mut instances = 0usize;
    for (k, (_, m)) in surfaces().into_iter().enumerate() {
        let n = m.dim();
        let samples = SphereSample::standard(n, rng);
        let v = &speeds[k % speeds.len()];
        for _ in 0..SPHERE_INSTANCES {
            let x = uniform(n, 1.0, rng);
            let p = uniform(n, 2.0, rng);
            let brute = sphere_min_objective(&m, v, &x, &p, 0.0, &samples);
            let h = (target.hamiltonian)(&m, v, &x, &p, 0.0);
            worst_value = worst_value.max((h + brute.value).abs());
            if brute.value < -h - 1e-9 {
                dominance_violations += 1;
            }
            if let Ok(a) = closed_form_minimizer(&m, &x, &p) {
                worst_angle = worst_angle.max(angular_distance(&a, &brute.argmin));
            }
            instances += 1;
        }
    }
    let passed = worst_value <= SPHERE_VALUE_TOL && worst_angle <= SPHERE_ANGLE_TOL && dominance_violations == 0;
    SuiteReport {
        suite: Suite::Sphere,
        instances,
        worst: worst_value,
        tolerance: SPHERE_VALUE_TOL,
        passed,
        detail: format!(
            "max angle {worst_angle:.3e} (tol {SPHERE_ANGLE_TOL:.0e}), dominance violations {dominance_violations}"
        ),
    }
}

pub const PROX_INSTANCES: usize = 10_000;
pub const PROX_TOL: f64 = 1e-3;
const PROX_CANDIDATES: usize = 20;

fn prox_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let fine = NestedGrid::default();
    let mut worst: f64 = 0.0;
    let mut violations = 0usize;
    let mut grid_checked = 0usize;
    for i in 0..PROX_INSTANCES {
        let n = 2 + i % 2;
        let g = uniform(n, 3.0, rng);
        let factor = MetricFactor::from_gradient(&g).expect("metric is positive definite");
        let beta = uniform(n, 2.0, rng);
        let threshold = rng.random_range(0.0..1.5);
        let (w, _) = prox_costate_factored(&beta, &factor.l, threshold).expect("factor is nonsingular");
        let phi = |c: &DVector<f64>| threshold * c.norm() + 0.5 * (c - &beta).norm_squared();
        let phi_w = phi(&w);
        let mut candidates = vec![beta.clone(), DVector::zeros(n)];
        for c in 0..PROX_CANDIDATES {
            let scale = [1e-1, 1e-3, 1e-6][c % 3];
            candidates.push(&w + DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal)));
        }
        if candidates.iter().any(|c| phi(c) < phi_w - 1e-14) {
            violations += 1;
        }
        if n == 2 || i % 100 == 1 {
            let grid = numeric_prox(|c| threshold * c.norm(), &beta, threshold * 1.1 + 1e-3, &fine);
            worst = worst.max((&grid - &w).amax());
            grid_checked += 1;
        }
    }
    SuiteReport {
        suite: Suite::Prox,
        instances: PROX_INSTANCES,
        worst,
        tolerance: PROX_TOL,
        passed: worst <= PROX_TOL && violations == 0,
        detail: format!("grid-checked {grid_checked}, candidates beating formula {violations}"),
    }
}

pub const GRADIENT_INSTANCES: usize = 100;
pub const GRADIENT_FD_STEP: f64 = 1e-6;
pub const GRADIENT_TOL: f64 = 1e-4;

fn gradient_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut worst: f64 = 0.0;
    let mut instances = 0usize;
    for (_, m) in surfaces() {
        let n = m.dim();
        for v in [SpeedModel::unit(), SpeedModel::quadratic_left()] {
            for _ in 0..GRADIENT_INSTANCES {
                let x = uniform(n, 1.0, rng);
                let p = uniform(n, 2.0, rng);
                let ip = IndicatorParams::new(uniform(n, 1.0, rng), rng.random_range(20.0..200.0));
                let analytic = grad_x_hamiltonian(&m, &v, &x, &p, 0.0, &ip);
                let numeric = fd_gradient(|y| indicated_hamiltonian(&m, &v, y, &p, 0.0, &ip), &x, GRADIENT_FD_STEP);
                let err = (&analytic - &numeric).amax() / numeric.amax().max(1.0);
                worst = worst.max(err);
                instances += 1;
            }
        }
    }
    SuiteReport {
        suite: Suite::Gradients,
        instances,
        worst,
        tolerance: GRADIENT_TOL,
        passed: worst <= GRADIENT_TOL,
        detail: format!("central differences, h = {GRADIENT_FD_STEP:.0e}, error relative to max(|∇|∞, 1)"),
    }
}

pub const IDENTITY_INSTANCES: usize = 1_000;
pub const IDENTITY_TOL: f64 = 1e-10;

fn identity_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut worst: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for i in 0..IDENTITY_INSTANCES {
        let n = 2 + i % 9;
        let gamma = uniform(n, 3.0, rng);
        let p = if i % 10 == 0 { &gamma * rng.random_range(-2.0..2.0) } else { uniform(n, 2.0, rng) };
        let Ok(a) = closed_form_minimizer_from_gradient(&gamma, &p) else {
            continue;
        };
        let f = sphere_objective(&gamma, &p, 1.0, &a) - 1.0;
        worst = worst.max((f + metric_norm(&gamma, &p)).abs());
        worst_norm = worst_norm.max((a.norm() - 1.0).abs());
    }
    let worst_all = worst.max(worst_norm);
    SuiteReport {
        suite: Suite::Identity,
        instances: IDENTITY_INSTANCES,
        worst: worst_all,
        tolerance: IDENTITY_TOL,
        passed: worst_all <= IDENTITY_TOL,
        detail: format!("dims 2..=10, every tenth p parallel to ∇M; max ||a*|-1| {worst_norm:.1e}"),
    }
}

pub const BOUND_INSTANCES: usize = 100;
pub const BOUND_SLACK: f64 = 1.05;
pub const BOUND_MAX_TAU_DT: f64 = 1e-2;

fn bound_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let grid = NestedGrid::default();
    let cases = [
        (ManifoldModel::sinusoid(1.0), SpeedModel::unit()),
        (ManifoldModel::sinusoid(1.0), SpeedModel::quadratic_left()),
        (ManifoldModel::gaussian_at_origin(2.0, 2), SpeedModel::unit()),
        (ManifoldModel::gaussian_at_origin(2.0, 2), SpeedModel::quadratic_left()),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..BOUND_INSTANCES {
        let (m, v) = &cases[i % cases.len()];
        let nu = uniform(2, 1.0, rng);
        let p = uniform(2, 2.0, rng);
        let tau_dt = rng.random_range(1e-3..BOUND_MAX_TAU_DT);
        let reach = prox_displacement_bound(m, v, &nu, &p, 0.0, tau_dt);
        let hw = 3.0 * reach + 1e-6;
        let x = numeric_prox(|y| -tau_dt * hamiltonian(m, v, y, &p, 0.0), &nu, hw, &grid);
        let rhs = prox_displacement_bound(m, v, &x, &p, 0.0, tau_dt);
        let moved = (&x - &nu).norm();
        let ratio = if rhs > 0.0 { moved / rhs } else if moved <= grid.resolution(hw) { 0.0 } else { f64::INFINITY };
        worst = worst.max(ratio);
    }
    SuiteReport {
        suite: Suite::Bound,
        instances: BOUND_INSTANCES,
        worst,
        tolerance: BOUND_SLACK,
        passed: worst <= BOUND_SLACK,
        detail: format!("worst |x-ν| / bound, τΔt ≤ {BOUND_MAX_TAU_DT:.0e}"),
    }
}
