//! Brute-force oracles and shared fixtures for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use cgpr_core::{make_phantom, Complex64, ComplexField, Pattern, PhantomSpec, SupportMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform re/im in [-1, 1).
pub fn random_field(rows: usize, cols: usize, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexField::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap()
}

/// Double-sum DFT; the inverse carries the 1/N factor.
pub fn naive_dft2(f: &ComplexField, inverse: bool) -> ComplexField {
    let (rows, cols) = f.shape();
    let sign = if inverse { 1.0 } else { -1.0 };
    let norm = if inverse { 1.0 / (rows * cols) as f64 } else { 1.0 };
    let out = ComplexField::from_fn(rows, cols, |k, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..rows {
            for c in 0..cols {
                let arg = 2.0 * PI * ((k * r) as f64 / rows as f64 + (l * c) as f64 / cols as f64);
                acc += f.at(r, c) * Complex64::from_polar(1.0, sign * arg);
            }
        }
        acc * norm
    })
    .unwrap();
    out.with_spacing(f.dx(), f.dy()).unwrap()
}

/// Circular central differences by explicit index arithmetic.
pub fn naive_grad(f: &ComplexField) -> (ComplexField, ComplexField) {
    let (rows, cols) = f.shape();
    let gx = ComplexField::from_fn(rows, cols, |r, c| {
        (f.at((r + 1) % rows, c) - f.at((r + rows - 1) % rows, c)) / (2.0 * f.dx())
    })
    .unwrap();
    let gy = ComplexField::from_fn(rows, cols, |r, c| {
        (f.at(r, (c + 1) % cols) - f.at(r, (c + cols - 1) % cols)) / (2.0 * f.dy())
    })
    .unwrap();
    (gx, gy)
}

pub fn naive_tv(f: &ComplexField) -> f64 {
    let (gx, gy) = naive_grad(f);
    gx.samples()
        .iter()
        .zip(gy.samples())
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
        .sum()
}

pub fn max_rel_dev(a: &ComplexField, b: &ComplexField) -> f64 {
    let scale = b.max_abs().max(f64::MIN_POSITIVE);
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

pub const DESK_WINDOW: usize = 128;
pub const DESK_SUPPORT: usize = 60;

pub fn desk_phantom(pattern: Pattern) -> (ComplexField, SupportMask) {
    make_phantom(&PhantomSpec {
        window: (DESK_WINDOW, DESK_WINDOW),
        support_extent: (DESK_SUPPORT, DESK_SUPPORT),
        phase_step: 2.0 * PI / 3.0,
        pattern,
        seed: 0,
    })
    .unwrap()
}

/// Checker phantom used for the stagnation plateau.
pub fn desk_checker() -> (ComplexField, SupportMask) {
    desk_phantom(Pattern::Checker(8))
}

/// Two-letter glyph phantom used for reconstruction quality.
pub fn desk_glyph() -> (ComplexField, SupportMask) {
    desk_phantom(Pattern::GlyphText("PR".into()))
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Prints the one-line verdict for a criterion and returns whether it passed.
pub fn report(id: &str, name: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    println!("criterion {id} {name}: {} ({})", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    pass
}
