use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ProblemSpec, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::MetricFactor;

/// Primal-dual iterate in reversed time: index 0 is the goal, index `J` the
/// query point.
///
/// All four sequences hold `J + 1` vectors. The costate slots `p[0]` and
/// `w[0]` are unused and stay zero, so `p[j]` is the multiplier on the step
/// from `x[j−1]` to `x[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryIterate {
    pub x: Vec<DVector<f64>>,
    pub p: Vec<DVector<f64>>,
    pub w: Vec<DVector<f64>>,
    pub z: Vec<DVector<f64>>,
}

impl TrajectoryIterate {
    /// Number of time steps `J`.
    pub fn steps(&self) -> usize {
        self.x.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn is_finite(&self) -> bool {
        [&self.x, &self.p, &self.w, &self.z]
            .iter()
            .all(|seq| seq.iter().all(|v| v.iter().all(|c| c.is_finite())))
    }
}

/// Straight line from goal to start plus Gaussian noise on the interior
/// states and on every costate. The endpoints are exact.
pub fn init_trajectory<R: Rng + ?Sized>(
    spec: &ProblemSpec,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<TrajectoryIterate> {
    let n = spec.dim();
    let steps = config.time_steps(spec.horizon);
    let noise = Normal::new(0.0, config.noise_std)
        .map_err(|e| Error::InvalidConfig(format!("noise: {e}")))?;
    let draw = |rng: &mut R| -> DVector<f64> {
        if config.noise_std == 0.0 {
            DVector::zeros(n)
        } else {
            DVector::from_fn(n, |_, _| noise.sample(rng))
        }
    };

    let delta = &spec.start - &spec.goal;
    let mut x = Vec::with_capacity(steps + 1);
    x.push(spec.goal.clone());
    for j in 1..steps {
        let s = j as f64 / steps as f64;
        x.push(&spec.goal + &delta * s + draw(rng));
    }
    x.push(spec.start.clone());

    let mut p = Vec::with_capacity(steps + 1);
    let mut w = Vec::with_capacity(steps + 1);
    p.push(DVector::zeros(n));
    w.push(DVector::zeros(n));
    for xj in &x[1..] {
        let pj = draw(rng);
        let factor = MetricFactor::at(&spec.manifold, xj)?;
        w.push(factor.l.matrix().tr_mul(&pj));
        p.push(pj);
    }
    let z = x.clone();
    Ok(TrajectoryIterate { x, p, w, z })
}

/// Largest absolute change of any state or costate entry.
pub fn convergence_change(prev: &TrajectoryIterate, next: &TrajectoryIterate) -> f64 {
    let max_diff = |a: &[DVector<f64>], b: &[DVector<f64>]| {
        a.iter().zip(b).map(|(u, v)| (u - v).amax()).fold(0.0f64, f64::max)
    };
    max_diff(&prev.x, &next.x).max(max_diff(&prev.p, &next.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldModel;
    use crate::hamiltonian::SpeedModel;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat_spec() -> ProblemSpec {
        ProblemSpec::new(dvector![1.0, 0.0], dvector![0.0, 0.0], 1.0, ManifoldModel::flat(2), SpeedModel::unit())
            .unwrap()
    }

    #[test]
    fn noiseless_start_is_a_straight_line() {
        let config = SolverConfig { noise_std: 0.0, ..SolverConfig::default() };
        let it = init_trajectory(&flat_spec(), &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(it.steps(), 10);
        assert_eq!(it.x[5], dvector![0.5, 0.0]);
        for (j, xj) in it.x.iter().enumerate() {
            assert!((xj - dvector![j as f64 / 10.0, 0.0]).amax() <= 1e-15);
        }
        assert!(it.p.iter().all(|p| p.iter().all(|&c| c == 0.0)));
        assert_eq!(it.z, it.x);
    }

    #[test]
    fn endpoints_are_exact_and_seed_is_deterministic() {
        let spec = ProblemSpec::new(
            dvector![-1.0, -1.0],
            dvector![1.0, 1.0],
            4.0,
            ManifoldModel::sinusoid(1.0),
            SpeedModel::unit(),
        )
        .unwrap();
        let config = SolverConfig::default();
        let a = init_trajectory(&spec, &config, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = init_trajectory(&spec, &config, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.x[0], spec.goal);
        assert_eq!(a.x[a.steps()], spec.start);
        assert_eq!(a.p[0], dvector![0.0, 0.0]);
        // w = Lᵀp
        for j in 1..=a.steps() {
            let l = MetricFactor::at(&spec.manifold, &a.x[j]).unwrap().l;
            assert!((l.matrix().transpose() * &a.p[j] - &a.w[j]).amax() <= 1e-14);
        }
    }

    #[test]
    fn change_metric() {
        let config = SolverConfig::default();
        let a = init_trajectory(&flat_spec(), &config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(convergence_change(&a, &a), 0.0);
        let mut b = a.clone();
        b.p[3][1] += 1e-2;
        assert!((convergence_change(&a, &b) - 1e-2).abs() <= 1e-15);

        let c = init_trajectory(&flat_spec(), &config, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut brute = 0.0f64;
        for j in 0..a.x.len() {
            for i in 0..2 {
                brute = brute.max((a.x[j][i] - c.x[j][i]).abs());
                brute = brute.max((a.p[j][i] - c.p[j][i]).abs());
            }
        }
        assert_eq!(convergence_change(&a, &c), brute);
    }
}
