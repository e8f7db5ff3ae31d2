//! Complex sample grids, the 2D DFT pair and circular central differences.
//!
//! Axis convention: a field is stored row-major; the row index plays the
//! role of `x` (sampled at `dx`) and the column index the role of `y`
//! (sampled at `dy`). The forward DFT is unnormalized and the inverse carries
//! `1/(rows*cols)`, so `power(f) == power(dft2(f)) / (rows*cols)`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{check_same_shape, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    samples: Vec<Complex64>,
}

/// Circular central-difference gradient of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientPair {
    pub gx: ComplexField,
    pub gy: ComplexField,
}

pub(crate) fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidShape { rows, cols });
    }
    Ok(())
}

pub(crate) fn check_spacing(dx: f64, dy: f64) -> Result<()> {
    if !(dx.is_finite() && dy.is_finite() && dx > 0.0 && dy > 0.0) {
        return Err(Error::InvalidSpacing { dx, dy });
    }
    Ok(())
}

impl ComplexField {
    /// Builds a field with unit sampling intervals.
    pub fn new(rows: usize, cols: usize, samples: Vec<Complex64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if samples.len() != rows * cols {
            return Err(Error::SampleCount {
                expected: rows * cols,
                found: samples.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            dx: 1.0,
            dy: 1.0,
            samples,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        check_shape(rows, cols)?;
        let mut samples = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                samples.push(f(r, c));
            }
        }
        Self::new(rows, cols, samples)
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

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Mutable view of the samples. The grid shape cannot change through it.
    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.samples[row * self.cols + col]
    }

    /// Same grid metadata, new samples produced pixelwise.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.with_samples(self.samples.iter().map(|&z| f(z)).collect())
    }

    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        check_same_shape(self.shape(), other.shape())?;
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// Σ|f|² over all pixels.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Field-wide Euclidean norm √(Σ|f|²).
    pub fn norm(&self) -> f64 {
        self.power().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ⟨self, other⟩ = Σ self·conj(other).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same_shape(self.shape(), other.shape())?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn dft2(&self) -> Self {
        let mut out = self.clone();
        fft2_in_place(&mut out.samples, self.rows, self.cols, FftDirection::Forward);
        out
    }

    pub fn idft2(&self) -> Self {
        let mut out = self.clone();
        fft2_in_place(&mut out.samples, self.rows, self.cols, FftDirection::Inverse);
        let norm = 1.0 / (self.rows * self.cols) as f64;
        out.samples.iter_mut().for_each(|z| *z *= norm);
        out
    }

    pub fn grad_central(&self) -> GradientPair {
        GradientPair {
            gx: self.with_samples(diff_rows(&self.samples, self.rows, self.cols, self.dx)),
            gy: self.with_samples(diff_cols(&self.samples, self.rows, self.cols, self.dy)),
        }
    }

    /// Per-pixel |∇ₓf|² + |∇_y f|², without materializing the gradient.
    pub(crate) fn grad_norm_sqr(&self) -> Vec<f64> {
        let (rows, cols) = self.shape();
        let sx = 1.0 / (2.0 * self.dx);
        let sy = 1.0 / (2.0 * self.dy);
        let s = &self.samples;
        let mut out = Vec::with_capacity(s.len());
        for r in 0..rows {
            let up = (r + 1) % rows * cols;
            let down = (r + rows - 1) % rows * cols;
            let row = r * cols;
            for c in 0..cols {
                let right = (c + 1) % cols;
                let left = (c + cols - 1) % cols;
                let gx = (s[up + c] - s[down + c]) * sx;
                let gy = (s[row + right] - s[row + left]) * sy;
                out.push(gx.norm_sqr() + gy.norm_sqr());
            }
        }
        out
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            rows: self.rows,
            cols: self.cols,
            dx: self.dx,
            dy: self.dy,
            samples,
        }
    }
}

impl GradientPair {
    /// Circular central-difference divergence ∇ₓgx + ∇_y gy.
    ///
    /// The central-difference operator is skew-adjoint under periodic
    /// boundaries, so `-divergence` is the exact adjoint of `grad_central`.
    pub fn divergence(&self) -> Result<ComplexField> {
        check_same_shape(self.gx.shape(), self.gy.shape())?;
        let (rows, cols) = self.gx.shape();
        let dxx = diff_rows(self.gx.samples(), rows, cols, self.gx.dx);
        let dyy = diff_cols(self.gy.samples(), rows, cols, self.gy.dy);
        let samples = dxx.into_iter().zip(dyy).map(|(a, b)| a + b).collect();
        Ok(self.gx.with_samples(samples))
    }
}

pub fn dft2(f: &ComplexField) -> ComplexField {
    f.dft2()
}

pub fn idft2(f: &ComplexField) -> ComplexField {
    f.idft2()
}

pub fn grad_central(f: &ComplexField) -> GradientPair {
    f.grad_central()
}

pub fn power(f: &ComplexField) -> f64 {
    f.power()
}

fn diff_rows(s: &[Complex64], rows: usize, cols: usize, dx: f64) -> Vec<Complex64> {
    let scale = 1.0 / (2.0 * dx);
    let mut out = Vec::with_capacity(s.len());
    for r in 0..rows {
        let up = (r + 1) % rows * cols;
        let down = (r + rows - 1) % rows * cols;
        for c in 0..cols {
            out.push((s[up + c] - s[down + c]) * scale);
        }
    }
    out
}

fn diff_cols(s: &[Complex64], rows: usize, cols: usize, dy: f64) -> Vec<Complex64> {
    let scale = 1.0 / (2.0 * dy);
    let mut out = Vec::with_capacity(s.len());
    for r in 0..rows {
        let row = &s[r * cols..(r + 1) * cols];
        for c in 0..cols {
            out.push((row[(c + 1) % cols] - row[(c + cols - 1) % cols]) * scale);
        }
    }
    out
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized 2D transform: every row, then every column.
fn fft2_in_place(buf: &mut [Complex64], rows: usize, cols: usize, direction: FftDirection) {
    plan(cols, direction).process(buf);

    let mut transposed = vec![Complex64::new(0.0, 0.0); buf.len()];
    transpose(buf, &mut transposed, rows, cols);
    plan(rows, direction).process(&mut transposed);
    transpose(&transposed, buf, cols, rows);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}
