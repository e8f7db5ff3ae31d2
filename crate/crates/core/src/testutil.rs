//! Brute-force oracles shared by unit tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::ComplexField;

pub fn random_field(rows: usize, cols: usize, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexField::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap()
}

/// Direct O(N⁴) double sum; `inverse` flips the sign and applies 1/(rows·cols).
pub fn naive_dft2(f: &ComplexField, inverse: bool) -> ComplexField {
    let (rows, cols) = f.shape();
    let sign = if inverse { 1.0 } else { -1.0 };
    let norm = if inverse { 1.0 / (rows * cols) as f64 } else { 1.0 };
    let out = ComplexField::from_fn(rows, cols, |k, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..rows {
            for y in 0..cols {
                let arg = sign
                    * 2.0
                    * PI
                    * (((k * x) % rows) as f64 / rows as f64 + ((l * y) % cols) as f64 / cols as f64);
                acc += f.at(x, y) * Complex64::from_polar(1.0, arg);
            }
        }
        acc * norm
    })
    .unwrap();
    out.with_spacing(f.dx(), f.dy()).unwrap()
}
