use nalgebra::DVector;

use super::problem::segment_points;
use super::{ProblemSpec, SolverConfig};

/// Low-discrepancy samples drawn for the gradient bound in dimension ≤ 10.
pub const BOX_SAMPLES_LOW_DIM: usize = 10_000;
/// Samples drawn in dimension > 10.
pub const BOX_SAMPLES_HIGH_DIM: usize = 1_000;
/// Extra samples along the straight segment between start and goal.
pub const SEGMENT_SAMPLES: usize = 1_000;

/// Largest `τ` allowed by `στ < 1 / (4·(1 + G²))`, scaled by the safety factor.
pub fn tau_from_bound(sigma: f64, grad_bound2: f64, safety: f64) -> f64 {
    safety / (4.0 * sigma * (1.0 + grad_bound2))
}

/// Estimate of `G² = sup |∇M|²` near the problem.
///
/// Samples the axis-aligned box around start and goal, widened by 50%, with a
/// Halton sequence, plus the straight segment between them. Axes where the
/// endpoints agree get half the largest box width.
pub fn estimate_grad_bound2(spec: &ProblemSpec) -> f64 {
    let m = &spec.manifold;
    if m.is_flat() {
        return 0.0;
    }
    let n = m.dim();
    let lo = spec.start.inf(&spec.goal);
    let hi = spec.start.sup(&spec.goal);
    let extent = &hi - &lo;
    let widest = extent.max().max(1.0);
    let center = (&lo + &hi) * 0.5;
    let half = extent.map(|e| 0.75 * if e > 0.0 { e } else { 0.5 * widest });

    let count = if n > 10 { BOX_SAMPLES_HIGH_DIM } else { BOX_SAMPLES_LOW_DIM };
    let halton = Halton::new(n);
    let mut best = 0.0f64;
    for i in 0..count {
        let u = halton.point(i + 1);
        let x = DVector::from_fn(n, |d, _| center[d] + half[d] * (2.0 * u[d] - 1.0));
        best = best.max(m.gradient(&x).norm_squared());
    }
    for x in segment_points(&spec.goal, &spec.start, SEGMENT_SAMPLES) {
        best = best.max(m.gradient(&x).norm_squared());
    }
    best
}

/// The primal step: the user override when set, otherwise the estimate.
pub fn estimate_tau(spec: &ProblemSpec, config: &SolverConfig) -> f64 {
    if let Some(tau) = config.tau {
        return tau;
    }
    tau_from_bound(config.sigma, estimate_grad_bound2(spec), config.tau_safety)
}

/// Halton sequence with the first `dim` primes as bases.
struct Halton {
    bases: Vec<u64>,
}

impl Halton {
    fn new(dim: usize) -> Self {
        let mut bases = Vec::with_capacity(dim);
        let mut candidate = 2u64;
        while bases.len() < dim {
            if bases.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
                bases.push(candidate);
            }
            candidate += 1;
        }
        Halton { bases }
    }

    fn point(&self, index: usize) -> Vec<f64> {
        self.bases.iter().map(|&b| radical_inverse(index as u64, b)).collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldModel;
    use crate::hamiltonian::SpeedModel;
    use nalgebra::dvector;
    use std::f64::consts::PI;

    fn spec(m: ManifoldModel, start: DVector<f64>, goal: DVector<f64>) -> ProblemSpec {
        ProblemSpec::new(start, goal, 5.0, m, SpeedModel::unit()).unwrap()
    }

    #[test]
    fn flat_surface_gives_quarter_with_safety() {
        let s = spec(ManifoldModel::flat(3), dvector![1.0, 0.0, 0.0], dvector![0.0, 0.0, 0.0]);
        assert!((estimate_tau(&s, &SolverConfig::default()) - 0.225).abs() <= 1e-15);
    }

    #[test]
    fn sinusoid_bound_is_a_squared_pi_squared() {
        let s = spec(ManifoldModel::sinusoid(1.0), dvector![-1.0, -1.0], dvector![1.0, 1.0]);
        let g2 = estimate_grad_bound2(&s);
        assert!((g2 - PI * PI).abs() <= 1e-2 * PI * PI, "{g2}");
        let tau = estimate_tau(&s, &SolverConfig::default());
        let expected = 0.9 / (4.0 * (1.0 + PI * PI));
        assert!((tau - expected).abs() <= 1e-2 * expected, "{tau}");
        assert!((expected - 0.0207).abs() < 5e-5);
    }

    #[test]
    fn override_wins() {
        let s = spec(ManifoldModel::sinusoid(3.0), dvector![-1.0, -1.0], dvector![1.0, 1.0]);
        let c = SolverConfig { tau: Some(0.01), ..SolverConfig::default() };
        assert_eq!(estimate_tau(&s, &c), 0.01);
    }

    #[test]
    fn high_dimensional_gaussian_sees_the_bump_along_the_segment() {
        // sup |∇(2e^{−|x|²})| = 4/√(2e) at |x| = 1/√2
        let n = 25;
        let mut start = DVector::from_element(n, -1.0);
        start[0] = -0.9;
        let s = spec(ManifoldModel::gaussian_at_origin(2.0, n), start, DVector::from_element(n, 1.0));
        let exact = 16.0 / (2.0 * std::f64::consts::E);
        let g2 = estimate_grad_bound2(&s);
        assert!(g2 <= exact * (1.0 + 1e-12) && g2 >= 0.99 * exact, "{g2} vs {exact}");
    }

    #[test]
    fn halton_first_points() {
        let h = Halton::new(2);
        assert_eq!(h.point(1), vec![0.5, 1.0 / 3.0]);
        assert_eq!(h.point(2), vec![0.25, 2.0 / 3.0]);
        assert_eq!(Halton::new(5).bases, vec![2, 3, 5, 7, 11]);
    }
}
