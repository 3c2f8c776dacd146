use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::hamiltonian::SpeedModel;

/// Number of sphere directions used by [`SphereSample::standard`].
pub const SPHERE_SAMPLES: usize = 100_000;

/// Projected-gradient refinement steps applied to the best sampled direction.
pub const POLISH_STEPS: usize = 50;

/// A finite set of unit directions in `ℝⁿ`.
///
/// The circle is covered by equally spaced angles, the 2-sphere by a
/// Fibonacci lattice, and higher spheres by normalized Gaussian draws.
#[derive(Clone, Debug)]
pub struct SphereSample {
    dim: usize,
    directions: Vec<DVector<f64>>,
}

impl SphereSample {
    pub fn new<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Self {
        assert!(dim >= 1 && count >= 1);
        let directions = match dim {
            1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
            2 => (0..count)
                .map(|k| {
                    let theta = 2.0 * PI * k as f64 / count as f64;
                    DVector::from_vec(vec![theta.cos(), theta.sin()])
                })
                .collect(),
            3 => fibonacci_sphere(count),
            _ => (0..count).map(|_| gaussian_direction(dim, rng)).collect(),
        };
        SphereSample { dim, directions }
    }

    pub fn standard<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self::new(dim, SPHERE_SAMPLES, rng)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[DVector<f64>] {
        &self.directions
    }
}

fn fibonacci_sphere(count: usize) -> Vec<DVector<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn gaussian_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let d = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = d.norm();
        if n > 1e-12 {
            return d / n;
        }
    }
}

/// Result of the brute-force minimization over the unit sphere.
#[derive(Clone, Debug)]
pub struct SphereMin {
    pub value: f64,
    pub argmin: DVector<f64>,
}

/// `v·q(a)·⟨a, p⟩ + 1` with `q(a) = (1 + ⟨γ, a⟩²)^{-1/2}`.
pub fn sphere_objective(gamma: &DVector<f64>, p: &DVector<f64>, speed: f64, a: &DVector<f64>) -> f64 {
    let ga = gamma.dot(a);
    speed * a.dot(p) / (1.0 + ga * ga).sqrt() + 1.0
}

fn sphere_objective_tangent_gradient(
    gamma: &DVector<f64>,
    p: &DVector<f64>,
    speed: f64,
    a: &DVector<f64>,
) -> DVector<f64> {
    let ga = gamma.dot(a);
    let q = 1.0 / (1.0 + ga * ga).sqrt();
    let grad = (p * q - gamma * (a.dot(p) * q * q * q * ga)) * speed;
    let radial = grad.dot(a);
    grad - a * radial
}

/// Minimizes the travel objective over a sampled sphere, then polishes the
/// best direction by projected gradient descent with backtracking.
///
/// The returned value equals `−H(x, p, t)` up to sampling error.
pub fn sphere_min_objective(
    m: &ManifoldModel,
    v: &SpeedModel,
    x: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
    samples: &SphereSample,
) -> SphereMin {
    let gamma = m.gradient(x);
    sphere_min_from_gradient(&gamma, p, v.value(x, t), samples)
}

/// [`sphere_min_objective`] with `∇M(x)` and `v(x, t)` already evaluated.
pub fn sphere_min_from_gradient(
    gamma: &DVector<f64>,
    p: &DVector<f64>,
    speed: f64,
    samples: &SphereSample,
) -> SphereMin {
    assert!(!samples.is_empty());
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (k, a) in samples.directions().iter().enumerate() {
        let f = sphere_objective(gamma, p, speed, a);
        if f < best_value {
            best_value = f;
            best = k;
        }
    }
    let mut a = samples.directions()[best].clone();
    let mut step = 0.5 / (speed * p.norm() * (1.0 + gamma.norm_squared()) + 1e-300);
    for _ in 0..POLISH_STEPS {
        let g = sphere_objective_tangent_gradient(gamma, p, speed, &a);
        if g.norm() == 0.0 {
            break;
        }
        let trial = &a - g * step;
        let trial = &trial / trial.norm();
        let f = sphere_objective(gamma, p, speed, &trial);
        if f < best_value {
            best_value = f;
            a = trial;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    SphereMin { value: best_value, argmin: a }
}

/// Closed-form minimizing direction of the travel objective,
///
/// `a* = −[(1+|γ|²)p − ⟨p,γ⟩γ] / √(|p|²(1+|γ|²)² − ⟨p,γ⟩²(2+|γ|²))`
///
/// with `γ = ∇M(x)`.
pub fn closed_form_minimizer(m: &ManifoldModel, x: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
    closed_form_minimizer_from_gradient(&m.gradient(x), p)
}

pub fn closed_form_minimizer_from_gradient(gamma: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
    if p.iter().all(|&c| c == 0.0) {
        return Err(Error::UndefinedDirection);
    }
    let s = 1.0 + gamma.norm_squared();
    let pg = p.dot(gamma);
    let denom = (p.norm_squared() * s * s - pg * pg * (1.0 + s)).max(0.0).sqrt();
    if denom == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    Ok((p * s - gamma * pg) * (-1.0 / denom))
}

/// Angle in radians between two nonzero vectors.
pub fn angular_distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let c = a.dot(b) / (a.norm() * b.norm());
    c.clamp(-1.0, 1.0).acos()
}
