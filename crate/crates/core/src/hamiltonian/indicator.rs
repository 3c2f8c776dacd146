use nalgebra::DVector;

/// Smooth surrogate `1 − exp(−B|x − x_f|²)` for the "not yet at the goal"
/// indicator. Vanishes at the goal and increases to 1 away from it.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorParams {
    pub goal: DVector<f64>,
    pub sharpness: f64,
}

impl IndicatorParams {
    pub fn new(goal: DVector<f64>, sharpness: f64) -> Self {
        debug_assert!(sharpness > 0.0);
        IndicatorParams { goal, sharpness }
    }

    pub fn with_sharpness(&self, sharpness: f64) -> Self {
        IndicatorParams { goal: self.goal.clone(), sharpness }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        -(-self.sharpness * (x - &self.goal).norm_squared()).exp_m1()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = x - &self.goal;
        let e = (-self.sharpness * d.norm_squared()).exp();
        d * (2.0 * self.sharpness * e)
    }
}

/// Free-function form of [`IndicatorParams::value`].
pub fn smooth_indicator(x: &DVector<f64>, ip: &IndicatorParams) -> f64 {
    ip.value(x)
}
