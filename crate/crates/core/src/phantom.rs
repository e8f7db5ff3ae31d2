//! Unit-amplitude binary phase test objects on a centered rectangular support.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::solver::SupportMask;

#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    /// Block-font text scaled to fill the support.
    GlyphText(String),
    /// Checkerboard with square cells of `block` pixels.
    Checker(usize),
    /// Disk of radius `radius_frac · min(h, w) / 2` at the support center.
    Disk(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub window: (usize, usize),
    pub support_extent: (usize, usize),
    pub phase_step: f64,
    pub pattern: Pattern,
    /// Drives the checkerboard origin offset; other patterns ignore it.
    pub seed: u64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.window;
        let (h, w) = self.support_extent;
        crate::field::check_shape(rows, cols)?;
        if h == 0 || w == 0 {
            return Err(Error::InvalidParameter {
                name: "support",
                reason: "support extent must be positive".into(),
            });
        }
        if 2 * h > rows || 2 * w > cols {
            return Err(Error::NyquistViolation {
                window: self.window,
                support: self.support_extent,
            });
        }
        if !(self.phase_step > 0.0 && self.phase_step < 2.0 * PI) {
            return Err(Error::InvalidParameter {
                name: "phase_step",
                reason: format!("must lie in (0, 2π), got {}", self.phase_step),
            });
        }
        match &self.pattern {
            Pattern::Checker(0) => Err(Error::InvalidParameter {
                name: "checker",
                reason: "block size must be positive".into(),
            }),
            Pattern::Disk(r) if !(*r > 0.0 && *r <= 1.0) => Err(Error::InvalidParameter {
                name: "disk",
                reason: format!("radius fraction must lie in (0, 1], got {r}"),
            }),
            _ => Ok(()),
        }
    }

    /// Top-left corner of the support: floor((window − extent) / 2) per axis.
    pub fn support_origin(&self) -> (usize, usize) {
        (
            (self.window.0 - self.support_extent.0) / 2,
            (self.window.1 - self.support_extent.1) / 2,
        )
    }
}

/// Renders the phantom and its support mask.
pub fn make_phantom(spec: &PhantomSpec) -> Result<(ComplexField, SupportMask)> {
    spec.validate()?;
    let (rows, cols) = spec.window;
    let (h, w) = spec.support_extent;
    let (r0, c0) = spec.support_origin();

    let layout = pattern_bitmap(spec)?;
    let shifted = Complex64::from_polar(1.0, spec.phase_step);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let inside = |r: usize, c: usize| r >= r0 && r < r0 + h && c >= c0 && c < c0 + w;
    let field = ComplexField::from_fn(rows, cols, |r, c| {
        if !inside(r, c) {
            zero
        } else if layout[(r - r0) * w + (c - c0)] {
            shifted
        } else {
            one
        }
    })?;
    let mask = SupportMask::from_fn(rows, cols, inside)?;
    Ok((field, mask))
}

/// conj(f) reflected through the origin with circular indexing.
pub fn twin(f: &ComplexField) -> ComplexField {
    let (rows, cols) = f.shape();
    let mut samples = Vec::with_capacity(f.len());
    for r in 0..rows {
        for c in 0..cols {
            samples.push(f.at((rows - r) % rows, (cols - c) % cols).conj());
        }
    }
    ComplexField::new(rows, cols, samples)
        .and_then(|t| t.with_spacing(f.dx(), f.dy()))
        .expect("twin preserves a valid grid")
}

/// Which support pixels carry the phase step, row-major over the support.
fn pattern_bitmap(spec: &PhantomSpec) -> Result<Vec<bool>> {
    let (h, w) = spec.support_extent;
    match &spec.pattern {
        Pattern::Checker(block) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let (or, oc) = (rng.random_range(0..*block), rng.random_range(0..*block));
            Ok((0..h * w)
                .map(|i| ((i / w + or) / block + (i % w + oc) / block) % 2 == 1)
                .collect())
        }
        Pattern::Disk(frac) => {
            let radius = frac * h.min(w) as f64 / 2.0;
            let (cr, cc) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
            Ok((0..h * w)
                .map(|i| {
                    let dr = (i / w) as f64 - cr;
                    let dc = (i % w) as f64 - cc;
                    dr.hypot(dc) <= radius
                })
                .collect())
        }
        Pattern::GlyphText(text) => render_text(text, h, w),
    }
}

const GLYPH_W: usize = 5;
const GLYPH_H: usize = 7;

fn render_text(text: &str, h: usize, w: usize) -> Result<Vec<bool>> {
    let glyphs = text
        .chars()
        .map(|ch| {
            glyph(ch).ok_or_else(|| Error::InvalidParameter {
                name: "glyph",
                reason: format!("no glyph for character {ch:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if glyphs.is_empty() {
        return Err(Error::InvalidParameter {
            name: "glyph",
            reason: "text must not be empty".into(),
        });
    }
    // one blank cell column between glyphs
    let cells_w = glyphs.len() * (GLYPH_W + 1) - 1;
    let scale = (w / cells_w).min(h / GLYPH_H);
    if scale == 0 {
        return Err(Error::InvalidParameter {
            name: "glyph",
            reason: format!("{} characters do not fit a {h}x{w} support", glyphs.len()),
        });
    }
    let (top, left) = ((h - GLYPH_H * scale) / 2, (w - cells_w * scale) / 2);
    let mut out = vec![false; h * w];
    for (gi, rows) in glyphs.iter().enumerate() {
        for (gr, bits) in rows.iter().enumerate() {
            for gc in 0..GLYPH_W {
                if bits >> (GLYPH_W - 1 - gc) & 1 == 0 {
                    continue;
                }
                let r_base = top + gr * scale;
                let c_base = left + (gi * (GLYPH_W + 1) + gc) * scale;
                for r in r_base..r_base + scale {
                    out[r * w + c_base..r * w + c_base + scale].fill(true);
                }
            }
        }
    }
    Ok(out)
}

fn glyph(ch: char) -> Option<[u8; GLYPH_H]> {
    let g = match ch.to_ascii_uppercase() {
        'A' => [0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001],
        'B' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110],
        'C' => [0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110],
        'D' => [0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100],
        'E' => [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111],
        'F' => [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000],
        'G' => [0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111],
        'H' => [0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001],
        'I' => [0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
        'J' => [0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100],
        'K' => [0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001],
        'L' => [0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111],
        'M' => [0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001],
        'N' => [0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001],
        'O' => [0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
        'P' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000],
        'Q' => [0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101],
        'R' => [0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001],
        'S' => [0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110],
        'T' => [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100],
        'U' => [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
        'V' => [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100],
        'W' => [0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010],
        'X' => [0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001],
        'Y' => [0b10001, 0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100],
        'Z' => [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111],
        '0' => [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
        '1' => [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
        '2' => [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
        '3' => [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
        '4' => [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
        '5' => [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
        '6' => [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
        '7' => [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
        '8' => [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
        '9' => [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
        ' ' => [0; GLYPH_H],
        _ => return None,
    };
    Some(g)
}
