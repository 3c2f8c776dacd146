use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::central_gradient;

pub type SpeedFn = Arc<dyn Fn(&DVector<f64>, f64) -> f64 + Send + Sync>;

/// Step used for central-difference speed gradients of generic fields.
pub const SPEED_FD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub enum SpeedKind {
    /// `v ≡ c`.
    Constant(f64),
    /// `v(x) = 1 + (x₁ − 1)²`: fast on the left, slow near `x₁ = 1`.
    QuadraticLeft,
    /// Arbitrary positive field `v(x, t)`; gradient by central differences.
    Generic(SpeedFn),
}

impl fmt::Debug for SpeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedKind::Constant(c) => write!(f, "Constant({c})"),
            SpeedKind::QuadraticLeft => write!(f, "QuadraticLeft"),
            SpeedKind::Generic(_) => write!(f, "Generic(..)"),
        }
    }
}

/// Local travel speed `v(x, t) > 0` in the base coordinates.
#[derive(Clone, Debug)]
pub struct SpeedModel {
    kind: SpeedKind,
}

impl SpeedModel {
    pub fn constant(c: f64) -> Self {
        SpeedModel { kind: SpeedKind::Constant(c) }
    }

    pub fn unit() -> Self {
        Self::constant(1.0)
    }

    pub fn quadratic_left() -> Self {
        SpeedModel { kind: SpeedKind::QuadraticLeft }
    }

    pub fn generic<F>(f: F) -> Self
    where
        F: Fn(&DVector<f64>, f64) -> f64 + Send + Sync + 'static,
    {
        SpeedModel { kind: SpeedKind::Generic(Arc::new(f)) }
    }

    /// Parses `const:c=<float>` or `quadleft`.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if s == "quadleft" {
            return Ok(Self::quadratic_left());
        }
        let Some(rest) = s.strip_prefix("const") else {
            return Err(Error::parse(input, "unknown speed kind"));
        };
        let c = match rest.strip_prefix(":c=") {
            Some(v) => v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(input, "speed constant is not a number"))?,
            None if rest.is_empty() => 1.0,
            None => return Err(Error::parse(input, "expected `const:c=<float>`")),
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::parse(input, "speed must be positive and finite"));
        }
        Ok(Self::constant(c))
    }

    pub fn kind(&self) -> &SpeedKind {
        &self.kind
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            SpeedKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn value(&self, x: &DVector<f64>, t: f64) -> f64 {
        match &self.kind {
            SpeedKind::Constant(c) => *c,
            SpeedKind::QuadraticLeft => 1.0 + (x[0] - 1.0).powi(2),
            SpeedKind::Generic(f) => f(x, t),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>, t: f64) -> DVector<f64> {
        match &self.kind {
            SpeedKind::Constant(_) => DVector::zeros(x.len()),
            SpeedKind::QuadraticLeft => {
                let mut g = DVector::zeros(x.len());
                g[0] = 2.0 * (x[0] - 1.0);
                g
            }
            SpeedKind::Generic(f) => central_gradient(&|y| f(y, t), x, SPEED_FD_STEP),
        }
    }
}
