use crate::error::{Error, Result};

/// Where the inner gradient descent for the state update starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentStart {
    /// The state from the previous outer iteration.
    Previous,
    /// The explicit point `ν = x − τ(p_j − p_{j+1})`.
    Nu,
}

/// When the change test is allowed to stop the iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvergenceGate {
    /// From the first iteration.
    Always,
    /// Once the indicator sharpness admits a feasible discrete path
    /// (see [`feasibility_sharpness`](super::feasibility_sharpness)).
    Feasible,
    /// Once the indicator sharpness reaches the given value.
    Sharpness(f64),
}

/// Parameters of the primal-dual iteration and its two-stage schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Target time step; the horizon is split into `J = round(t / dt)` steps.
    pub dt: f64,
    /// Dual step `σ`.
    pub sigma: f64,
    /// Primal step `τ`; estimated from the step-size rule when `None`.
    pub tau: Option<f64>,
    /// Fraction of the largest admissible `τ` used by the estimate.
    pub tau_safety: f64,
    /// Extrapolation weight `κ ∈ [0, 1]`.
    pub kappa: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// First iteration of the gradient-descent stage.
    pub stage_switch: usize,
    pub eta0: f64,
    pub sharpness0: f64,
    /// Sharpness added at every annealing period.
    pub sharpness_step: f64,
    pub sharpness_max: f64,
    pub anneal_period: usize,
    pub gd_steps: usize,
    pub descent_start: DescentStart,
    pub convergence_gate: ConvergenceGate,
    pub seed: u64,
    /// Stream selector for the RNG; batch runs use the path index.
    pub stream: u64,
    pub noise_std: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.1,
            sigma: 1.0,
            tau: None,
            tau_safety: 0.9,
            kappa: 1.0,
            max_iters: 40_000,
            tol: 1e-3,
            stage_switch: 2000,
            eta0: 0.025,
            sharpness0: 50.0,
            sharpness_step: 50.0,
            sharpness_max: 5000.0,
            anneal_period: 1000,
            gd_steps: 1,
            descent_start: DescentStart::Previous,
            convergence_gate: ConvergenceGate::Feasible,
            seed: 0,
            stream: 0,
            noise_std: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return bad("tau must be positive");
            }
        }
        if !(self.tau_safety > 0.0 && self.tau_safety <= 1.0) {
            return bad("tau safety factor must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return bad("kappa must lie in [0, 1]");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.eta0 > 0.0) {
            return bad("eta0 must be positive");
        }
        if !(self.sharpness0 > 0.0) || self.sharpness_step < 0.0 || self.sharpness_max < self.sharpness0 {
            return bad("sharpness schedule must start positive and stay below its cap");
        }
        if self.anneal_period == 0 {
            return bad("anneal_period must be at least 1");
        }
        if self.gd_steps == 0 {
            return bad("gd_steps must be at least 1");
        }
        if let ConvergenceGate::Sharpness(b) = self.convergence_gate {
            if !(b >= 0.0 && b.is_finite()) {
                return bad("convergence gate sharpness must be nonnegative");
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad("noise_std must be nonnegative");
        }
        Ok(())
    }

    /// Number of time steps `J` for a horizon.
    pub fn time_steps(&self, horizon: f64) -> usize {
        ((horizon / self.dt).round() as usize).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range_values() {
        let cases: Vec<Box<dyn Fn(&mut SolverConfig)>> = vec![
            Box::new(|c| c.dt = 0.0),
            Box::new(|c| c.sigma = -1.0),
            Box::new(|c| c.tau = Some(0.0)),
            Box::new(|c| c.kappa = 1.5),
            Box::new(|c| c.max_iters = 0),
            Box::new(|c| c.tol = 0.0),
            Box::new(|c| c.anneal_period = 0),
            Box::new(|c| c.gd_steps = 0),
            Box::new(|c| c.noise_std = f64::NAN),
            Box::new(|c| c.sharpness_max = 1.0),
        ];
        for mutate in cases {
            let mut c = SolverConfig::default();
            mutate(&mut c);
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn time_steps_round_to_nearest() {
        let c = SolverConfig::default();
        assert_eq!(c.time_steps(3.0), 30);
        assert_eq!(c.time_steps(2.96), 30);
        assert_eq!(c.time_steps(0.01), 1);
    }
}
