//! Surfaces given as graphs of smooth functions and the linear algebra of
//! their induced metric.

mod manifold;
mod metric;

pub use manifold::{HeightFn, ManifoldKind, ManifoldModel, FD_GRADIENT_STEP, FD_HESSIAN_STEP};
pub(crate) use manifold::central_gradient;
pub use metric::{
    cholesky_factor, closed_form_factor_2d, manifold_arclength, metric_from_gradient,
    metric_matrix, solve_lower, solve_upper_transpose, LowerTriangular, MetricFactor,
};
