//! Brute-force reference computations used to check the closed-form
//! formulas: sphere minimization of the travel objective, grid-searched
//! proximal points, central-difference gradients and exact flat-space
//! travel times.

mod sphere;
pub mod suites;

use nalgebra::DVector;

pub use sphere::{
    angular_distance, closed_form_minimizer, closed_form_minimizer_from_gradient, sphere_min_from_gradient,
    sphere_min_objective, sphere_objective, SphereMin, SphereSample, POLISH_STEPS, SPHERE_SAMPLES,
};
pub use suites::{run_suites, HamiltonianFn, Suite, SuiteReport, VerifyTarget};

/// Nested grid used by [`numeric_prox`].
///
/// The coarse level evaluates `points_per_axis` points per coordinate over a
/// cube of the given half-width. Each of the `refinements` further levels
/// recenters on the best point so far and shrinks the half-width by `refine`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NestedGrid {
    pub points_per_axis: usize,
    pub refinements: usize,
    pub refine: f64,
}

impl Default for NestedGrid {
    fn default() -> Self {
        NestedGrid { points_per_axis: 81, refinements: 3, refine: 10.0 }
    }
}

impl NestedGrid {
    /// Final grid spacing for a starting half-width.
    pub fn resolution(&self, half_width: f64) -> f64 {
        let spacing = 2.0 * half_width / (self.points_per_axis - 1) as f64;
        spacing / self.refine.powi(self.refinements as i32)
    }
}

/// Grid-search approximation of `argmin_x objective(x) + ½|x − ν|²` over the
/// cube of the given half-width centered at `ν`.
pub fn numeric_prox<F>(objective: F, nu: &DVector<f64>, half_width: f64, grid: &NestedGrid) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    assert!(grid.points_per_axis >= 2 && half_width > 0.0);
    let n = nu.len();
    let k = grid.points_per_axis;
    let mut center = nu.clone();
    let mut hw = half_width;
    let mut point = nu.clone();
    let mut index = vec![0usize; n];
    for _ in 0..=grid.refinements {
        let spacing = 2.0 * hw / (k - 1) as f64;
        let mut best = center.clone();
        let mut best_value = f64::INFINITY;
        index.iter_mut().for_each(|i| *i = 0);
        'grid: loop {
            for d in 0..n {
                point[d] = center[d] - hw + spacing * index[d] as f64;
            }
            let value = objective(&point) + 0.5 * (&point - nu).norm_squared();
            if value < best_value {
                best_value = value;
                best.copy_from(&point);
            }
            for d in 0..n {
                index[d] += 1;
                if index[d] < k {
                    continue 'grid;
                }
                index[d] = 0;
            }
            break;
        }
        center = best;
        hw /= grid.refine;
    }
    center
}

/// Componentwise central differences `(f(x + h·eᵢ) − f(x − h·eᵢ)) / 2h`.
pub fn fd_gradient<F>(field: F, x: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    assert!(h > 0.0);
    let mut y = x.clone();
    DVector::from_fn(x.len(), |i, _| {
        y[i] = x[i] + h;
        let plus = field(&y);
        y[i] = x[i] - h;
        let minus = field(&y);
        y[i] = x[i];
        (plus - minus) / (2.0 * h)
    })
}

/// Travel time `|x − x_f| / v₀` on a flat surface with constant speed.
pub fn flat_exact_value(x: &DVector<f64>, goal: &DVector<f64>, v0: f64) -> f64 {
    assert!(v0 > 0.0);
    (x - goal).norm() / v0
}
