//! Minimal-time path planning on manifolds that are graphs of smooth
//! functions `M: ℝⁿ → ℝ`.
//!
//! A single query `(x, t)` is answered without a spatial grid: time is
//! discretized along the path and the resulting saddle-point problem over
//! state and costate trajectories is solved by a primal-dual splitting
//! iteration. The result is the travel time from `x` to the goal together
//! with the optimal state and costate trajectories.
//!
//! ```no_run
//! use geopath_core::{solve_path, ManifoldModel, ProblemSpec, SolverConfig, SpeedModel};
//! use nalgebra::dvector;
//!
//! let spec = ProblemSpec::new(
//!     dvector![-1.0, -1.0],
//!     dvector![1.0, 1.0],
//!     4.0,
//!     ManifoldModel::sinusoid(1.0),
//!     SpeedModel::unit(),
//! )
//! .unwrap();
//! let sol = solve_path(&spec, &SolverConfig::default()).unwrap();
//! println!("travel time {:.4} after {} iterations", sol.value, sol.iterations);
//! ```

pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{ManifoldKind, ManifoldModel, MetricFactor};
pub use hamiltonian::{IndicatorParams, SpeedKind, SpeedModel};
pub use solver::{
    solve_path, ConvergenceGate, DescentStart, PathSolution, PathSolver, ProblemSpec, SolverConfig, TrajectoryIterate,
};
