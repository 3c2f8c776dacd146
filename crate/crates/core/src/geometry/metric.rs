use nalgebra::{DMatrix, DVector};

use super::ManifoldModel;
use crate::error::{Error, Result};

/// Lower-triangular factor with a strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular(DMatrix<f64>);

impl LowerTriangular {
    /// Wraps `m`, checking shape and that the strict upper part is zero.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        for j in 1..m.ncols() {
            for i in 0..j {
                if m[(i, j)] != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "entry ({i}, {j}) above the diagonal is nonzero"
                    )));
                }
            }
        }
        Ok(LowerTriangular(m))
    }

    pub fn identity(n: usize) -> Self {
        LowerTriangular(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// The induced metric `A(x)`, its Cholesky factor and `|∇M(x)|²` at one point.
#[derive(Clone, Debug)]
pub struct MetricFactor {
    pub a: DMatrix<f64>,
    pub l: LowerTriangular,
    pub grad_norm2: f64,
}

impl MetricFactor {
    /// Factors the metric at `x`. Two-dimensional manifolds use the closed
    /// form of the factor; other dimensions use [`cholesky_factor`].
    pub fn at(m: &ManifoldModel, x: &DVector<f64>) -> Result<Self> {
        let g = m.gradient(x);
        Self::from_gradient(&g)
    }

    pub fn from_gradient(g: &DVector<f64>) -> Result<Self> {
        let a = metric_from_gradient(g)?;
        let l = if g.len() == 2 {
            closed_form_factor_2d(g[0], g[1])
        } else {
            cholesky_factor(&a)?
        };
        Ok(MetricFactor { a, l, grad_norm2: g.norm_squared() })
    }
}

/// `A(x) = I − ∇M∇Mᵀ / (1 + |∇M|²)`.
pub fn metric_matrix(m: &ManifoldModel, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric point"));
    }
    metric_from_gradient(&m.gradient(x))
}

pub fn metric_from_gradient(g: &DVector<f64>) -> Result<DMatrix<f64>> {
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("manifold gradient"));
    }
    let n = g.len();
    let scale = 1.0 / (1.0 + g.norm_squared());
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - g[i] * g[j] * scale
    }))
}

/// Cholesky–Banachiewicz factorization `A = L·Lᵀ` of a symmetric positive
/// definite matrix. Only the lower triangle of `a` is read.
pub fn cholesky_factor(a: &DMatrix<f64>) -> Result<LowerTriangular> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(LowerTriangular(l))
}

/// Explicit factor of the 2×2 metric in terms of `(M_x, M_y)`:
///
/// ```text
///            1          ⎡ √(1+M_y²)                0            ⎤
/// L = ───────────── ·   ⎢                                       ⎥
///     √(1+|∇M|²)        ⎣ −M_x M_y/√(1+M_y²)   √((1+|∇M|²)/(1+M_y²)) ⎦
/// ```
pub fn closed_form_factor_2d(mx: f64, my: f64) -> LowerTriangular {
    let g2 = mx * mx + my * my;
    let pre = 1.0 / (1.0 + g2).sqrt();
    let r = (1.0 + my * my).sqrt();
    LowerTriangular(DMatrix::from_row_slice(
        2,
        2,
        &[pre * r, 0.0, -pre * mx * my / r, pre * ((1.0 + g2).sqrt() / r)],
    ))
}

/// Forward substitution: returns `L⁻¹b`.
pub fn solve_lower(l: &LowerTriangular, b: &DVector<f64>) -> Result<DVector<f64>> {
    let l = &l.0;
    let n = l.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut y = b.clone();
    for i in 0..n {
        let d = l[(i, i)];
        if d == 0.0 {
            return Err(Error::SingularFactor(i));
        }
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / d;
    }
    Ok(y)
}

/// Back substitution against the transpose: returns `(Lᵀ)⁻¹b`.
pub fn solve_upper_transpose(l: &LowerTriangular, b: &DVector<f64>) -> Result<DVector<f64>> {
    let l = &l.0;
    let n = l.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut y = b.clone();
    for i in (0..n).rev() {
        let d = l[(i, i)];
        if d == 0.0 {
            return Err(Error::SingularFactor(i));
        }
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / d;
    }
    Ok(y)
}

/// Length of the lifted polyline `(x_j, M(x_j))` in `ℝⁿ⁺¹`.
pub fn manifold_arclength(m: &ManifoldModel, path: &[DVector<f64>]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidConfig("a path needs at least two points".into()));
    }
    let mut prev_h = m.height(&path[0]);
    let mut total = 0.0;
    for pair in path.windows(2) {
        let h = m.height(&pair[1]);
        let dx2 = (&pair[1] - &pair[0]).norm_squared();
        let dz = h - prev_h;
        total += (dx2 + dz * dz).sqrt();
        prev_h = h;
    }
    if !total.is_finite() {
        return Err(Error::NonFinite("path"));
    }
    Ok(total)
}
