//! Problem fixtures shared by the benchmarks.

use geopath_core::solver::{default_horizon, init_trajectory, TrajectoryIterate};
use geopath_core::{ManifoldModel, ProblemSpec, SolverConfig, SpeedModel};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sinusoid `sin(πx)cos(πy)` from `(−1, −1)` to `(1, 1)`.
pub fn sinusoid_problem() -> ProblemSpec {
    ProblemSpec::new(
        DVector::from_element(2, -1.0),
        DVector::from_element(2, 1.0),
        4.0,
        ManifoldModel::sinusoid(1.0),
        SpeedModel::unit(),
    )
    .expect("valid problem")
}

/// Gaussian bump `2·exp(−|x|²)` from `(−0.9, −1, …)` to `(1, …, 1)`.
pub fn bump_problem(n: usize) -> ProblemSpec {
    let mut start = DVector::from_element(n, -1.0);
    start[0] = -0.9;
    let goal = DVector::from_element(n, 1.0);
    let (m, v) = (ManifoldModel::gaussian_at_origin(2.0, n), SpeedModel::unit());
    let horizon = default_horizon(&start, &goal, &m, &v, 0.1, 1.2).expect("positive speed");
    ProblemSpec::new(start, goal, horizon, m, v).expect("valid problem")
}

pub fn initial_iterate(spec: &ProblemSpec, config: &SolverConfig) -> TrajectoryIterate {
    init_trajectory(spec, config, &mut ChaCha8Rng::seed_from_u64(0)).expect("finite initialization")
}

/// A point and costate with generic (nonzero, non-aligned) gradients.
pub fn sample_point(n: usize) -> (DVector<f64>, DVector<f64>) {
    let x = DVector::from_fn(n, |i, _| 0.3 - 0.05 * i as f64);
    let p = DVector::from_fn(n, |i, _| if i % 2 == 0 { 0.7 } else { -0.4 });
    (x, p)
}
