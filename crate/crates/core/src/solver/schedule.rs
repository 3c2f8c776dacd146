use super::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// State updates take the explicit point `ν` as the proximal point.
    Passthrough,
    /// State updates run gradient descent on the proximal objective.
    GradientDescent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub eta: f64,
    pub sharpness: f64,
    pub stage: Stage,
}

/// Descent rate, indicator sharpness and stage at outer iteration `k`.
///
/// After `stage_switch`, every `anneal_period` iterations halves the rate
/// and adds `sharpness_step` to the sharpness (capped at `sharpness_max`).
pub fn anneal(k: usize, config: &SolverConfig) -> Schedule {
    if k < config.stage_switch {
        return Schedule {
            eta: config.eta0,
            sharpness: config.sharpness0,
            stage: Stage::Passthrough,
        };
    }
    let periods = (k - config.stage_switch) / config.anneal_period;
    let eta = config.eta0 * 0.5f64.powi(periods.min(i32::MAX as usize) as i32);
    let sharpness = (config.sharpness0 + config.sharpness_step * periods as f64).min(config.sharpness_max);
    Schedule { eta, sharpness, stage: Stage::GradientDescent }
}

/// `1 / c²` with `c = max_{s>0} (1 − e^{−s²}) / s`, attained where
/// `(2s² + 1)e^{−s²} = 1`.
pub const FEASIBILITY_SCALE: f64 = 2.4554074822841265;

/// Smallest indicator sharpness `B` for which a first step away from the
/// goal can satisfy `r ≤ Δt·v·(1 − e^{−Br²})`, namely
/// `B = FEASIBILITY_SCALE / (Δt·v)²`.
///
/// Below it the only discrete path that honours the smoothed goal
/// constraint is the one that never leaves the goal, so a small change
/// between iterates does not yet indicate a solution.
pub fn feasibility_sharpness(dt: f64, speed_at_goal: f64) -> f64 {
    FEASIBILITY_SCALE / (dt * speed_at_goal).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_points() {
        let c = SolverConfig::default();
        assert_eq!(anneal(0, &c).stage, Stage::Passthrough);
        assert_eq!(anneal(1999, &c).stage, Stage::Passthrough);
        let s = anneal(2000, &c);
        assert_eq!(s, Schedule { eta: 0.025, sharpness: 50.0, stage: Stage::GradientDescent });
        let s = anneal(4500, &c);
        assert_eq!(s.eta, 0.00625);
        assert_eq!(s.sharpness, 150.0);
        assert_eq!(anneal(39_999, &c).sharpness, 1900.0);
        assert_eq!(anneal(40_000, &c).sharpness, 1950.0);
    }

    #[test]
    fn feasibility_threshold() {
        let b = feasibility_sharpness(0.1, 1.0);
        assert!((b - 245.54074822841265).abs() < 1e-9);
        // the constraint is tight at the optimal radius and slack nowhere else
        let r = 1.1209064227785326 / b.sqrt();
        assert!((r - 0.1 * (1.0 - (-b * r * r).exp())).abs() < 1e-12);
        for k in 1..200 {
            let r = k as f64 * 1e-3;
            assert!(r >= 0.1 * (1.0 - (-b * r * r).exp()) - 1e-12);
        }
    }

    #[test]
    fn sharpness_is_capped() {
        let c = SolverConfig { sharpness_max: 120.0, ..SolverConfig::default() };
        assert_eq!(anneal(100_000, &c).sharpness, 120.0);
        assert!(anneal(100_000, &c).eta > 0.0);
    }
}
