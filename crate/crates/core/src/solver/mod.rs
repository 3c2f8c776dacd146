//! Primal-dual splitting for the discrete saddle-point problem
//!
//! ```text
//! u(x, t) ≈ min_{x_j} max_{p_j}  g(x_0) + Σ_j ⟨p_j, x_j − x_{j−1}⟩ − Δt Σ_j 𝟙(x_j)·H(x_j, p_j, t_j)
//! ```
//!
//! with `x_0` the goal and `x_J` the query point. Costates are updated in the
//! variable `w_j = L(x_j)ᵀp_j`, where the proximal step is a closed-form
//! shrinkage; states are updated by a pass-through approximation for the
//! first stage and by a few gradient-descent steps afterwards.

mod config;
mod iterate;
mod problem;
mod schedule;
mod step_size;

use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{ConvergenceGate, DescentStart, SolverConfig};
pub use iterate::{convergence_change, init_trajectory, TrajectoryIterate};
pub use problem::{default_horizon, GoalConstraint, ProblemSpec, TerminalCost, DEFAULT_HORIZON_FACTOR};
pub use schedule::{anneal, feasibility_sharpness, Schedule, Stage, FEASIBILITY_SCALE};
pub use step_size::{
    estimate_grad_bound2, estimate_tau, tau_from_bound, BOX_SAMPLES_HIGH_DIM, BOX_SAMPLES_LOW_DIM,
    SEGMENT_SAMPLES,
};

use crate::error::{Error, Result};
use crate::geometry::{solve_lower, MetricFactor};
use crate::hamiltonian::{
    hamiltonian, prox_costate_factored, prox_state_gd, prox_state_passthrough, IndicatorParams,
};

/// Output of a single path solve.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSolution {
    /// Approximate minimal travel time.
    pub value: f64,
    /// The same sum evaluated without the indicator factor on `H`.
    pub value_without_indicator: f64,
    /// States `x_0 … x_J` in reversed time (goal first).
    pub states: Vec<DVector<f64>>,
    /// Costates `p_1 … p_J`.
    pub costates: Vec<DVector<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub final_change: f64,
    pub wall_time: f64,
    pub dt: f64,
    pub tau: f64,
}

impl PathSolution {
    /// States ordered from the start point to the goal.
    pub fn forward_states(&self) -> Vec<DVector<f64>> {
        self.states.iter().rev().cloned().collect()
    }
}

/// A configured solve for one problem: holds the derived step sizes.
#[derive(Clone, Debug)]
pub struct PathSolver<'a> {
    spec: &'a ProblemSpec,
    config: &'a SolverConfig,
    steps: usize,
    dt: f64,
    tau: f64,
}

impl<'a> PathSolver<'a> {
    pub fn new(spec: &'a ProblemSpec, config: &'a SolverConfig) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        let steps = config.time_steps(spec.horizon);
        let dt = spec.horizon / steps as f64;
        let tau = estimate_tau(spec, config);
        Ok(PathSolver { spec, config, steps, dt, tau })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(self.config.stream);
        rng
    }

    pub fn init(&self) -> Result<TrajectoryIterate> {
        init_trajectory(self.spec, self.config, &mut self.rng())
    }

    /// One primal-dual iteration in place.
    pub fn step(&self, iter: &mut TrajectoryIterate, k: usize) -> Result<()> {
        let spec = self.spec;
        let (m, v) = (&spec.manifold, &spec.speed);
        let sigma = self.config.sigma;
        let sched = anneal(k, self.config);
        let ip = IndicatorParams::new(spec.goal.clone(), sched.sharpness);
        let diverged = |what| Error::Divergence { iteration: k, what };

        // dual ascent in w, all j at the current states
        for j in 1..=self.steps {
            let xj = &iter.x[j];
            let factor = MetricFactor::at(m, xj).map_err(|_| diverged("metric factor"))?;
            let dz = &iter.z[j] - &iter.z[j - 1];
            let beta = &iter.w[j] + solve_lower(&factor.l, &dz)? * sigma;
            let threshold = sigma * self.dt * ip.value(xj) * v.value(xj, self.time(j));
            let (w, p) = prox_costate_factored(&beta, &factor.l, threshold)?;
            iter.w[j] = w;
            iter.p[j] = p;
        }

        let old_x = iter.x.clone();
        let terminal = spec.terminal_cost();
        iter.x[0] = terminal.prox(&(&old_x[0] + &iter.p[1] * self.tau), self.tau);
        for j in 1..self.steps {
            let nu = &old_x[j] - (&iter.p[j] - &iter.p[j + 1]) * self.tau;
            iter.x[j] = match sched.stage {
                Stage::Passthrough => prox_state_passthrough(&nu),
                Stage::GradientDescent => {
                    let start = match self.config.descent_start {
                        DescentStart::Previous => &old_x[j],
                        DescentStart::Nu => &nu,
                    };
                    prox_state_gd(
                        &nu,
                        start,
                        &iter.p[j],
                        self.time(j),
                        self.tau * self.dt,
                        sched.eta,
                        self.config.gd_steps,
                        m,
                        v,
                        &ip,
                    )
                    .map_err(|_| diverged("state gradient descent"))?
                }
            };
        }
        iter.x[self.steps] = spec.start.clone();

        let kappa = self.config.kappa;
        for j in 0..=self.steps {
            iter.z[j] = &iter.x[j] + (&iter.x[j] - &old_x[j]) * kappa;
        }
        if !iter.is_finite() {
            return Err(diverged("non-finite iterate"));
        }
        Ok(())
    }

    /// `g(x_0) + Σ_j ⟨p_j, x_j − x_{j−1}⟩ − Δt·𝟙(x_j)·H(x_j, p_j, t_j)`.
    pub fn value(&self, iter: &TrajectoryIterate, sharpness: f64) -> f64 {
        self.value_parts(iter, sharpness).0
    }

    /// The value with and without the indicator factor on `H`.
    fn value_parts(&self, iter: &TrajectoryIterate, sharpness: f64) -> (f64, f64) {
        let spec = self.spec;
        let ip = IndicatorParams::new(spec.goal.clone(), sharpness);
        let mut with = spec.terminal_cost().value(&iter.x[0]);
        let mut without = with;
        for j in 1..=self.steps {
            let (xj, pj) = (&iter.x[j], &iter.p[j]);
            let pairing = pj.dot(&(xj - &iter.x[j - 1]));
            let h = hamiltonian(&spec.manifold, &spec.speed, xj, pj, self.time(j));
            with += pairing - self.dt * ip.value(xj) * h;
            without += pairing - self.dt * h;
        }
        (with, without)
    }

    /// Sharpness below which a small change does not stop the iteration.
    pub fn gate_sharpness(&self) -> f64 {
        let threshold = match self.config.convergence_gate {
            ConvergenceGate::Always => return 0.0,
            ConvergenceGate::Sharpness(b) => b,
            ConvergenceGate::Feasible => {
                feasibility_sharpness(self.dt, self.spec.speed.value(&self.spec.goal, 0.0))
            }
        };
        let reachable = anneal(self.config.max_iters.saturating_sub(1), self.config).sharpness;
        if threshold > reachable {
            log::warn!(
                "convergence gate sharpness {threshold:.1} is never reached (schedule ends at {reachable:.1}); \
                 testing from the last sharpness level instead"
            );
            return reachable;
        }
        threshold
    }

    pub fn solve(&self) -> Result<PathSolution> {
        let started = Instant::now();
        let mut iter = self.init()?;
        let mut converged = false;
        let mut final_change = f64::INFINITY;
        let mut iterations = 0;
        let gate = self.gate_sharpness();
        for k in 0..self.config.max_iters {
            let prev = iter.clone();
            self.step(&mut iter, k)?;
            iterations = k + 1;
            final_change = convergence_change(&prev, &iter);
            if final_change < self.config.tol && anneal(k, self.config).sharpness >= gate {
                converged = true;
                break;
            }
        }
        let sharpness = anneal(iterations.saturating_sub(1), self.config).sharpness;
        let (value, value_without_indicator) = self.value_parts(&iter, sharpness);
        log::debug!(
            "solve finished: u = {value:.6} (without indicator {value_without_indicator:.6}), \
             {iterations} iterations, converged = {converged}"
        );
        Ok(PathSolution {
            value,
            value_without_indicator,
            costates: iter.p[1..].to_vec(),
            states: iter.x,
            converged,
            iterations,
            final_change,
            wall_time: started.elapsed().as_secs_f64(),
            dt: self.dt,
            tau: self.tau,
        })
    }
}

/// Runs one primal-dual iteration on `iter`.
pub fn pdhg_step(
    iter: &mut TrajectoryIterate,
    spec: &ProblemSpec,
    config: &SolverConfig,
    k: usize,
) -> Result<()> {
    PathSolver::new(spec, config)?.step(iter, k)
}

/// The approximate value at the indicator sharpness of iteration `k`.
pub fn extract_value(iter: &TrajectoryIterate, spec: &ProblemSpec, config: &SolverConfig, k: usize) -> Result<f64> {
    let solver = PathSolver::new(spec, config)?;
    Ok(solver.value(iter, anneal(k, config).sharpness))
}

pub fn solve_path(spec: &ProblemSpec, config: &SolverConfig) -> Result<PathSolution> {
    PathSolver::new(spec, config)?.solve()
}
