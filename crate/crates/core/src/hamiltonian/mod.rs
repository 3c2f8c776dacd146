//! The minimal-time Hamiltonian `H(x, p, t) = v(x, t)·√(pᵀA(x)p) − 1`, its
//! state gradient and the two proximal updates of the splitting scheme.

mod indicator;
mod speed;

use nalgebra::{DMatrix, DVector};

pub use indicator::{smooth_indicator, IndicatorParams};
pub use speed::{SpeedFn, SpeedKind, SpeedModel, SPEED_FD_STEP};

use crate::error::{Error, Result};
use crate::geometry::{solve_upper_transpose, LowerTriangular, ManifoldModel, MetricFactor};

/// Below this costate norm the `√(pᵀAp)` term is dropped from the gradient.
pub const COSTATE_GUARD: f64 = 1e-10;

/// `√(pᵀAp)` evaluated from `g = ∇M` without forming `A`.
pub fn metric_norm(g: &DVector<f64>, p: &DVector<f64>) -> f64 {
    let pg = p.dot(g);
    (p.norm_squared() - pg * pg / (1.0 + g.norm_squared())).max(0.0).sqrt()
}

pub fn hamiltonian(
    m: &ManifoldModel,
    v: &SpeedModel,
    x: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
) -> f64 {
    let g = m.gradient(x);
    v.value(x, t) * metric_norm(&g, p) - 1.0
}

/// `𝟙(x)·H(x, p, t)` with the smooth goal indicator.
pub fn indicated_hamiltonian(
    m: &ManifoldModel,
    v: &SpeedModel,
    x: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
    ip: &IndicatorParams,
) -> f64 {
    ip.value(x) * hamiltonian(m, v, x, p, t)
}

/// `∇ₓ√(pᵀA(x)p)` given `∇M`, the Hessian of `M` and the precomputed root.
fn grad_metric_norm(g: &DVector<f64>, hess: &DMatrix<f64>, p: &DVector<f64>, root: f64) -> DVector<f64> {
    let pg = p.dot(g);
    let s = 1.0 + g.norm_squared();
    let numer = hess * (g * (pg * pg) - p * (s * pg));
    numer / (root * s * s)
}

/// `∇ₓ(𝟙(x)·H(x, p, t))` by the product rule
///
/// `(v√(pᵀAp) − 1)∇𝟙 + 𝟙√(pᵀAp)∇v + 𝟙v∇√(pᵀAp)`.
///
/// When `|p|` is below [`COSTATE_GUARD`] the last term is set to zero.
pub fn grad_x_hamiltonian(
    m: &ManifoldModel,
    v: &SpeedModel,
    x: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
    ip: &IndicatorParams,
) -> DVector<f64> {
    let g = m.gradient(x);
    let root = metric_norm(&g, p);
    let speed = v.value(x, t);
    let ind = ip.value(x);

    let mut out = ip.gradient(x) * (speed * root - 1.0);
    if ind != 0.0 {
        if root != 0.0 && !matches!(v.kind(), SpeedKind::Constant(_)) {
            out += v.gradient(x, t) * (ind * root);
        }
        if p.norm() >= COSTATE_GUARD && !m.is_flat() && root > 0.0 {
            let hess = m.hessian(x);
            out += grad_metric_norm(&g, &hess, p, root) * (ind * speed);
        }
    }
    out
}

/// Shrinkage of `β` toward the origin by `threshold`; `β = 0` maps to 0.
pub fn shrink(beta: &DVector<f64>, threshold: f64) -> DVector<f64> {
    let norm = beta.norm();
    if norm == 0.0 {
        return DVector::zeros(beta.len());
    }
    let scale = (1.0 - threshold / norm).max(0.0);
    beta * scale
}

/// Closed-form costate update: the proximal point of `σΔt·𝟙·H` in the
/// transformed variable `w = Lᵀp`, followed by `p = (Lᵀ)⁻¹w`.
///
/// Returns `(w, p)`.
#[allow(clippy::too_many_arguments)]
pub fn prox_costate(
    beta: &DVector<f64>,
    x: &DVector<f64>,
    t: f64,
    sigma_dt: f64,
    ip: &IndicatorParams,
    m: &ManifoldModel,
    v: &SpeedModel,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let factor = MetricFactor::at(m, x)?;
    let threshold = sigma_dt * ip.value(x) * v.value(x, t);
    prox_costate_factored(beta, &factor.l, threshold)
}

/// [`prox_costate`] with the metric factor and shrinkage threshold
/// `σΔt·𝟙(x)·v(x, t)` already evaluated.
pub fn prox_costate_factored(
    beta: &DVector<f64>,
    l: &LowerTriangular,
    threshold: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let w = shrink(beta, threshold);
    let p = solve_upper_transpose(l, &w)?;
    Ok((w, p))
}

/// Approximates `prox_{−τΔt·𝟙H(·, p, t)}(ν)` by `steps` gradient-descent
/// iterations of rate `eta`, starting from `start`.
#[allow(clippy::too_many_arguments)]
pub fn prox_state_gd(
    nu: &DVector<f64>,
    start: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
    tau_dt: f64,
    eta: f64,
    steps: usize,
    m: &ManifoldModel,
    v: &SpeedModel,
    ip: &IndicatorParams,
) -> Result<DVector<f64>> {
    let mut x = start.clone();
    for _ in 0..steps {
        let grad = grad_x_hamiltonian(m, v, &x, p, t, ip);
        let step = (&x - nu) - grad * tau_dt;
        x -= step * eta;
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("state gradient descent"));
        }
    }
    Ok(x)
}

/// Stage-one state update: the proximal point is approximated by `ν`.
pub fn prox_state_passthrough(nu: &DVector<f64>) -> DVector<f64> {
    nu.clone()
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm_symmetric(h: &DMatrix<f64>) -> f64 {
    h.clone().symmetric_eigen().eigenvalues.amax()
}

/// Right-hand side of the state-prox displacement bound
/// `τΔt|p|(|∇v(x,t)| + 2|v(x,t)|·‖ℋ_M(x)‖₂)`.
pub fn prox_displacement_bound(
    m: &ManifoldModel,
    v: &SpeedModel,
    x: &DVector<f64>,
    p: &DVector<f64>,
    t: f64,
    tau_dt: f64,
) -> f64 {
    let hess_norm = spectral_norm_symmetric(&m.hessian(x));
    tau_dt * p.norm() * (v.gradient(x, t).norm() + 2.0 * v.value(x, t).abs() * hess_norm)
}
