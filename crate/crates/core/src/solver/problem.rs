use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::hamiltonian::SpeedModel;

/// Terminal cost `g` at the goal end of the reversed trajectory.
pub trait TerminalCost {
    fn value(&self, x: &DVector<f64>) -> f64;
    /// `argmin_y { step·g(y) + ½|y − x|² }`.
    fn prox(&self, x: &DVector<f64>, step: f64) -> DVector<f64>;
}

/// Convex indicator of a single goal point: 0 there, `+∞` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalConstraint {
    pub goal: DVector<f64>,
}

impl TerminalCost for GoalConstraint {
    fn value(&self, x: &DVector<f64>) -> f64 {
        if x == &self.goal {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, _x: &DVector<f64>, _step: f64) -> DVector<f64> {
        self.goal.clone()
    }
}

/// A single minimal-time query: travel from `start` to `goal` within
/// `horizon` on the graph of `manifold` with local speed `speed`.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub start: DVector<f64>,
    pub goal: DVector<f64>,
    pub horizon: f64,
    pub manifold: ManifoldModel,
    pub speed: SpeedModel,
}

impl ProblemSpec {
    pub fn new(
        start: DVector<f64>,
        goal: DVector<f64>,
        horizon: f64,
        manifold: ManifoldModel,
        speed: SpeedModel,
    ) -> Result<Self> {
        let spec = ProblemSpec { start, goal, horizon, manifold, speed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.manifold.dim();
        for v in [&self.start, &self.goal] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("problem endpoints"));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig("horizon must be positive".into()));
        }
        let bound = self.horizon_lower_bound();
        if self.horizon < bound {
            log::warn!(
                "horizon {} is below the straight-line travel bound {:.4}; the goal may be unreachable",
                self.horizon,
                bound
            );
        }
        Ok(())
    }

    /// `|x − x_f| / max v`, with the speed sampled along the segment.
    pub fn horizon_lower_bound(&self) -> f64 {
        let dist = (&self.start - &self.goal).norm();
        if dist == 0.0 {
            return 0.0;
        }
        let vmax = segment_points(&self.goal, &self.start, 100)
            .map(|x| self.speed.value(&x, 0.0))
            .fold(0.0f64, f64::max);
        dist / vmax
    }

    pub fn terminal_cost(&self) -> GoalConstraint {
        GoalConstraint { goal: self.goal.clone() }
    }
}

/// Multiplier on the straight-segment travel time used by [`default_horizon`].
pub const DEFAULT_HORIZON_FACTOR: f64 = 1.5;

/// Horizon heuristic for queries without an explicit `t`:
/// `factor · (manifold arc length of the straight segment) / (min speed on it)`,
/// rounded up to a whole number of time steps `dt` (at least one).
pub fn default_horizon(
    start: &DVector<f64>,
    goal: &DVector<f64>,
    manifold: &ManifoldModel,
    speed: &SpeedModel,
    dt: f64,
    factor: f64,
) -> Result<f64> {
    const SEGMENT_POINTS: usize = 1000;
    let points: Vec<_> = segment_points(goal, start, SEGMENT_POINTS).collect();
    let length = crate::geometry::manifold_arclength(manifold, &points)?;
    let vmin = points.iter().map(|x| speed.value(x, 0.0)).fold(f64::INFINITY, f64::min);
    if !(vmin > 0.0) {
        return Err(Error::InvalidConfig("speed must be positive along the segment".into()));
    }
    let steps = (factor * length / vmin / dt - 1e-9).ceil().max(1.0);
    Ok(steps * dt)
}

/// `count + 1` evenly spaced points from `a` to `b`, inclusive.
pub(crate) fn segment_points<'a>(
    a: &'a DVector<f64>,
    b: &'a DVector<f64>,
    count: usize,
) -> impl Iterator<Item = DVector<f64>> + 'a {
    (0..=count).map(move |i| {
        let s = i as f64 / count as f64;
        a + (b - a) * s
    })
}
