//! Isotropic total variation on complex fields and the descent step used to
//! pull an iterate's complexity down.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GradientPair};

/// How the floor ε under the TV square root is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothing {
    /// ε = factor · max(1, max|∇f|), evaluated once per call.
    Relative(f64),
    /// Fixed ε.
    Absolute(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TvParams {
    pub smoothing: Smoothing,
    /// Descent step scale `t`: each step moves the field by `t·‖f‖₂`.
    pub step_scale_t: f64,
}

impl Default for TvParams {
    fn default() -> Self {
        Self {
            smoothing: Smoothing::Relative(1e-8),
            step_scale_t: 0.005,
        }
    }
}

impl TvParams {
    pub fn new(step_scale_t: f64) -> Result<Self> {
        let p = Self {
            step_scale_t,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Result<Self> {
        self.smoothing = smoothing;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let eps = match self.smoothing {
            Smoothing::Relative(e) | Smoothing::Absolute(e) => e,
        };
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be positive, got {eps}"),
            });
        }
        if !(self.step_scale_t > 0.0 && self.step_scale_t < 1.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("must lie in (0, 1), got {}", self.step_scale_t),
            });
        }
        Ok(())
    }

    fn epsilon(&self, max_grad: f64) -> f64 {
        match self.smoothing {
            Smoothing::Relative(k) => k * max_grad.max(1.0),
            Smoothing::Absolute(e) => e,
        }
    }
}

/// Σ √(|∇ₓf|² + |∇_y f|²), unsmoothed.
pub fn tv(f: &ComplexField) -> f64 {
    f.grad_norm_sqr().iter().map(|v| v.sqrt()).sum()
}

/// Functional gradient of smoothed TV with respect to conj(f):
/// −½ div(∇f / √(|∇f|² + ε²)).
pub fn tv_gradient(f: &ComplexField, p: &TvParams) -> ComplexField {
    let GradientPair { gx, gy } = f.grad_central();
    let mags: Vec<f64> = gx
        .samples()
        .iter()
        .zip(gy.samples())
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    let max_grad = mags.iter().copied().fold(0.0, f64::max).sqrt();
    let eps2 = p.epsilon(max_grad).powi(2);

    let inv: Vec<f64> = mags.iter().map(|m| 1.0 / (m + eps2).sqrt()).collect();
    let mut nx = gx;
    let mut ny = gy;
    for ((a, b), w) in nx.samples_mut().iter_mut().zip(ny.samples_mut()).zip(&inv) {
        *a *= *w;
        *b *= *w;
    }
    let div = GradientPair { gx: nx, gy: ny }
        .divergence()
        .expect("gradient components share a shape");
    div.scale(Complex64::new(-0.5, 0.0))
}

/// Unit-L2 direction of `tv_gradient`.
pub fn tv_unit_direction(f: &ComplexField, p: &TvParams) -> Result<ComplexField> {
    let g = tv_gradient(f, p);
    let norm = g.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroGradient);
    }
    Ok(g.scale(Complex64::new(1.0 / norm, 0.0)))
}

/// f − t·‖f‖₂·û.
pub fn tv_descent_step(f: &ComplexField, p: &TvParams) -> Result<ComplexField> {
    let u = tv_unit_direction(f, p)?;
    let step = p.step_scale_t * f.norm();
    Ok(f.zip_map(&u, |a, b| a - b * step)
        .expect("direction shares the field's shape"))
}
