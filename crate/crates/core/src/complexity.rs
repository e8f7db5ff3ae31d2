//! The complexity parameter ζ = Σ(|∇ₓg|² + |∇_y g|²), evaluated either on an
//! image-domain field or directly from Fourier magnitudes via the modified
//! wave numbers sin(2πk/rows)/dx and sin(2πl/cols)/dy.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{check_shape, check_spacing, ComplexField};

/// Measured Fourier magnitudes |G| on the DFT grid of an image-domain window.
///
/// `dx`/`dy` are the image-domain sampling intervals the spectrum belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnitudeData {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    values: Vec<f64>,
}

impl MagnitudeData {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if values.len() != rows * cols {
            return Err(Error::SampleCount {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "magnitude",
                reason: format!("values must be finite and non-negative, found {bad}"),
            });
        }
        Ok(Self {
            rows,
            cols,
            dx: 1.0,
            dy: 1.0,
            values,
        })
    }

    /// |F| of a spectrum, carrying its sampling intervals.
    pub fn from_spectrum(spectrum: &ComplexField) -> Self {
        Self {
            rows: spectrum.rows(),
            cols: spectrum.cols(),
            dx: spectrum.dx(),
            dy: spectrum.dy(),
            values: spectrum.samples().iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn with_spacing(mut self, dx: f64, dy: f64) -> Result<Self> {
        check_spacing(dx, dy)?;
        self.dx = dx;
        self.dy = dy;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// ζ of an image-domain field using circular central differences.
pub fn complexity_image(f: &ComplexField) -> f64 {
    f.grad_norm_sqr().iter().sum()
}

/// ζ from Fourier magnitudes alone.
///
/// Under the unnormalized forward DFT the sum carries an explicit
/// `1/(rows*cols)`, which makes it equal `complexity_image` of any field whose
/// spectrum has these magnitudes. Indices above the Nyquist bin alias to
/// negative frequencies; sin² is even, so no shift is needed.
pub fn complexity_fourier(m: &MagnitudeData) -> f64 {
    let (rows, cols) = m.shape();
    let wx: Vec<f64> = (0..rows)
        .map(|k| ((2.0 * PI * k as f64 / rows as f64).sin() / m.dx).powi(2))
        .collect();
    let wy: Vec<f64> = (0..cols)
        .map(|l| ((2.0 * PI * l as f64 / cols as f64).sin() / m.dy).powi(2))
        .collect();
    let mut acc = 0.0;
    for (k, row) in m.values.chunks_exact(cols).enumerate() {
        for (l, v) in row.iter().enumerate() {
            acc += (wx[k] + wy[l]) * v * v;
        }
    }
    acc / (rows * cols) as f64
}

/// Closed interval `[target·(1−tol), target·(1+tol)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceBand {
    pub low: f64,
    pub high: f64,
}

impl ToleranceBand {
    pub fn contains(&self, zeta: f64) -> bool {
        zeta >= self.low && zeta <= self.high
    }
}

pub fn complexity_tolerance_band(zeta_target: f64, rel_tol: f64) -> Result<ToleranceBand> {
    if !(zeta_target.is_finite() && zeta_target > 0.0) {
        return Err(Error::InvalidParameter {
            name: "zeta_target",
            reason: format!("must be positive, got {zeta_target}"),
        });
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "zeta_rel_tol",
            reason: format!("must lie in (0, 1), got {rel_tol}"),
        });
    }
    Ok(ToleranceBand {
        low: zeta_target * (1.0 - rel_tol),
        high: zeta_target * (1.0 + rel_tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_field;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn plane_wave() -> ComplexField {
        ComplexField::from_fn(8, 8, |r, _| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / 8.0))
            .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constant_field_has_zero_complexity() {
        let f = ComplexField::new(5, 4, vec![Complex64::new(0.3, -2.0); 20]).unwrap();
        assert_eq!(complexity_image(&f), 0.0);
        let m = MagnitudeData::from_spectrum(&f.dft2());
        assert!(complexity_fourier(&m) < 1e-24);
    }

    #[test]
    fn plane_wave_complexity_is_32() {
        // 64 pixels, each |∇ₓf|² = sin²(π/4) = 1/2.
        let f = plane_wave();
        assert!((complexity_image(&f) - 32.0).abs() < 1e-12);
        let m = MagnitudeData::from_spectrum(&f.dft2());
        assert!((m.at(1, 0) - 64.0).abs() < 1e-12);
        assert!((complexity_fourier(&m) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn image_and_fourier_routes_agree() {
        for (rows, cols, seed) in [(16, 16, 1), (32, 32, 2), (7, 5, 3), (9, 12, 4)] {
            let f = random_field(rows, cols, seed).with_spacing(0.8, 1.7).unwrap();
            let img = complexity_image(&f);
            let four = complexity_fourier(&MagnitudeData::from_spectrum(&f.dft2()));
            assert!(rel(four, img) <= 1e-12, "{rows}x{cols}: {img} vs {four}");
        }
    }

    #[test]
    fn tolerance_band() {
        let b = complexity_tolerance_band(100.0, 0.005).unwrap();
        assert!((b.low - 99.5).abs() < 1e-12 && (b.high - 100.5).abs() < 1e-12);
        assert_eq!(
            complexity_tolerance_band(1.0, 0.5).unwrap(),
            ToleranceBand { low: 0.5, high: 1.5 }
        );
        assert!(b.contains(100.0));
        assert!(complexity_tolerance_band(1.0, 0.0).is_err());
        assert!(complexity_tolerance_band(1.0, 1.0).is_err());
        assert!(complexity_tolerance_band(0.0, 0.1).is_err());
    }

    #[test]
    fn rejects_negative_magnitudes() {
        assert!(MagnitudeData::new(2, 2, vec![1.0, -0.5, 0.0, 0.0]).is_err());
        assert!(MagnitudeData::new(2, 2, vec![1.0; 3]).is_err());
    }

    proptest! {
        #[test]
        fn band_contains_its_center(z in 1e-6f64..1e9, tol in 1e-6f64..0.999) {
            prop_assert!(complexity_tolerance_band(z, tol).unwrap().contains(z));
        }

        #[test]
        fn complexity_scales_quadratically(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let f = random_field(6, 5, seed);
            let c = Complex64::new(re, im);
            let lhs = complexity_image(&f.scale(c));
            let rhs = c.norm_sqr() * complexity_image(&f);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn fourier_route_is_phase_blind(seed in 0u64..1000, phase_seed in 0u64..1000) {
            let spec = random_field(6, 6, seed);
            let phases = random_field(6, 6, phase_seed);
            let rotated = spec.zip_map(&phases, |z, p| z * Complex64::from_polar(1.0, p.arg())).unwrap();
            let a = complexity_fourier(&MagnitudeData::from_spectrum(&spec));
            let b = complexity_fourier(&MagnitudeData::from_spectrum(&rotated));
            prop_assert!((a - b).abs() <= 1e-13 * a);
        }
    }
}
