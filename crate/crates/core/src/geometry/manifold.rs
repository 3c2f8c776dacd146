use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Step for central-difference gradients of generic manifolds.
pub const FD_GRADIENT_STEP: f64 = 1e-5;
/// Step for second-order central-difference Hessians of generic manifolds.
pub const FD_HESSIAN_STEP: f64 = 1e-4;

pub type HeightFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Shape of the height function `M`.
#[derive(Clone)]
pub enum ManifoldKind {
    /// `M ≡ 0`.
    Flat,
    /// `M(x, y) = a·sin(πx)·cos(πy)`, two-dimensional only.
    Sinusoid { a: f64 },
    /// `M(x) = amplitude·exp(−|x − center|²)`.
    Gaussian { amplitude: f64, center: DVector<f64> },
    /// Arbitrary height callback; derivatives by central differences.
    Generic(HeightFn),
}

impl fmt::Debug for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldKind::Flat => write!(f, "Flat"),
            ManifoldKind::Sinusoid { a } => write!(f, "Sinusoid {{ a: {a} }}"),
            ManifoldKind::Gaussian { amplitude, center } => {
                write!(f, "Gaussian {{ amplitude: {amplitude}, center: {:?} }}", center.as_slice())
            }
            ManifoldKind::Generic(_) => write!(f, "Generic(..)"),
        }
    }
}

/// A manifold given as the graph `{(x, M(x))}` of a smooth function on `ℝⁿ`.
///
/// Immutable after construction; cloning is cheap and clones may be shared
/// across threads.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    dim: usize,
    kind: ManifoldKind,
}

impl ManifoldModel {
    pub fn flat(dim: usize) -> Self {
        ManifoldModel { dim, kind: ManifoldKind::Flat }
    }

    pub fn sinusoid(a: f64) -> Self {
        ManifoldModel { dim: 2, kind: ManifoldKind::Sinusoid { a } }
    }

    pub fn gaussian(amplitude: f64, center: DVector<f64>) -> Self {
        ManifoldModel {
            dim: center.len(),
            kind: ManifoldKind::Gaussian { amplitude, center },
        }
    }

    /// Gaussian bump centred at the origin.
    pub fn gaussian_at_origin(amplitude: f64, dim: usize) -> Self {
        Self::gaussian(amplitude, DVector::zeros(dim))
    }

    pub fn generic<F>(dim: usize, height: F) -> Self
    where
        F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        ManifoldModel { dim, kind: ManifoldKind::Generic(Arc::new(height)) }
    }

    /// The same surface with its analytic derivatives replaced by finite
    /// differences of the height.
    pub fn to_finite_difference(&self) -> Self {
        let inner = self.clone();
        Self::generic(self.dim, move |x| inner.height(x))
    }

    /// Parses `flat`, `sinusoid:a=<float>` or
    /// `gaussian:amp=<float>,center=<comma-floats>`.
    ///
    /// `dim` fixes the dimension of `flat` and is checked against the other
    /// kinds. A gaussian without a `center` is centred at the origin.
    pub fn parse(input: &str, dim: usize) -> Result<Self> {
        let input = input.trim();
        let (name, args) = match input.split_once(':') {
            Some((n, a)) => (n.trim(), a.trim()),
            None => (input, ""),
        };
        let model = match name {
            "flat" => {
                if !args.is_empty() {
                    return Err(Error::parse(input, "flat takes no parameters"));
                }
                Self::flat(dim)
            }
            "sinusoid" => {
                let a = match args.strip_prefix("a=") {
                    Some(v) => parse_float(input, v)?,
                    None if args.is_empty() => 1.0,
                    None => return Err(Error::parse(input, "expected `a=<float>`")),
                };
                Self::sinusoid(a)
            }
            "gaussian" => {
                // `center=` swallows the remaining comma-separated floats.
                let (head, center) = match args.find("center=") {
                    Some(pos) => (&args[..pos], Some(&args[pos + "center=".len()..])),
                    None => (args, None),
                };
                let mut amplitude = 1.0;
                for item in head.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match item.strip_prefix("amp=") {
                        Some(v) => amplitude = parse_float(input, v)?,
                        None => return Err(Error::parse(input, format!("unknown key `{item}`"))),
                    }
                }
                let center = match center {
                    Some(list) => DVector::from_vec(parse_floats(input, list)?),
                    None => DVector::zeros(dim),
                };
                Self::gaussian(amplitude, center)
            }
            _ => return Err(Error::parse(input, "unknown manifold kind")),
        };
        if model.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: model.dim });
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, ManifoldKind::Flat)
    }

    pub fn height(&self, x: &DVector<f64>) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            ManifoldKind::Flat => 0.0,
            ManifoldKind::Sinusoid { a } => a * (PI * x[0]).sin() * (PI * x[1]).cos(),
            ManifoldKind::Gaussian { amplitude, center } => {
                amplitude * (-(x - center).norm_squared()).exp()
            }
            ManifoldKind::Generic(f) => f(x),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            ManifoldKind::Flat => DVector::zeros(self.dim),
            ManifoldKind::Sinusoid { a } => {
                let (sx, cx) = (PI * x[0]).sin_cos();
                let (sy, cy) = (PI * x[1]).sin_cos();
                DVector::from_vec(vec![a * PI * cx * cy, -a * PI * sx * sy])
            }
            ManifoldKind::Gaussian { amplitude, center } => {
                let d = x - center;
                let e = amplitude * (-d.norm_squared()).exp();
                d * (-2.0 * e)
            }
            ManifoldKind::Generic(f) => central_gradient(f.as_ref(), x, FD_GRADIENT_STEP),
        }
    }

    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            ManifoldKind::Flat => DMatrix::zeros(self.dim, self.dim),
            ManifoldKind::Sinusoid { a } => {
                let (sx, cx) = (PI * x[0]).sin_cos();
                let (sy, cy) = (PI * x[1]).sin_cos();
                let s = a * PI * PI;
                let diag = -s * sx * cy;
                let off = -s * cx * sy;
                DMatrix::from_row_slice(2, 2, &[diag, off, off, diag])
            }
            ManifoldKind::Gaussian { amplitude, center } => {
                let d = x - center;
                let e = amplitude * (-d.norm_squared()).exp();
                let mut h = &d * d.transpose() * (4.0 * e);
                for i in 0..self.dim {
                    h[(i, i)] -= 2.0 * e;
                }
                h
            }
            ManifoldKind::Generic(f) => central_hessian(f.as_ref(), x, FD_HESSIAN_STEP),
        }
    }
}

fn parse_float(input: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(input, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::parse(input, "value must be finite"));
    }
    Ok(v)
}

fn parse_floats(input: &str, list: &str) -> Result<Vec<f64>> {
    list.split(',').map(|s| parse_float(input, s)).collect()
}

/// Central-difference gradient of a scalar field.
pub(crate) fn central_gradient(
    f: &dyn Fn(&DVector<f64>) -> f64,
    x: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    let mut probe = x.clone();
    DVector::from_fn(x.len(), |i, _| {
        let xi = probe[i];
        probe[i] = xi + h;
        let fp = f(&probe);
        probe[i] = xi - h;
        let fm = f(&probe);
        probe[i] = xi;
        (fp - fm) / (2.0 * h)
    })
}

/// Second-order central-difference Hessian, symmetric by construction.
pub(crate) fn central_hessian(
    f: &dyn Fn(&DVector<f64>) -> f64,
    x: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let n = x.len();
    let mut probe = x.clone();
    let f0 = f(x);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = probe[i];
        probe[i] = xi + h;
        let fp = f(&probe);
        probe[i] = xi - h;
        let fm = f(&probe);
        probe[i] = xi;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let xj = probe[j];
            let mut corner = |si: f64, sj: f64| {
                probe[i] = xi + si * h;
                probe[j] = xj + sj * h;
                let v = f(&probe);
                probe[i] = xi;
                probe[j] = xj;
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}
