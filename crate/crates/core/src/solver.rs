//! Iterative phase-retrieval engines.
//!
//! Both engines alternate a Fourier-magnitude projection with a hybrid
//! input-output (HIO) update against the object support. The complexity-guided
//! engine adds a TV descent sub-loop after every HIO update that stops once
//! the iterate's complexity falls into a tolerance band around the complexity
//! estimated from the magnitude data.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexity::{complexity_fourier, complexity_image, complexity_tolerance_band, MagnitudeData};
use crate::error::{check_same_shape, Error, Result};
use crate::field::{check_shape, ComplexField};
use crate::phantom::twin;
use crate::sparsity::{tv, tv_unit_direction, Smoothing, TvParams};

/// Object-domain support constraint; `true` marks pixels inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportMask {
    rows: usize,
    cols: usize,
    inside: Vec<bool>,
}

impl SupportMask {
    pub fn new(rows: usize, cols: usize, inside: Vec<bool>) -> Result<Self> {
        check_shape(rows, cols)?;
        if inside.len() != rows * cols {
            return Err(Error::SampleCount {
                expected: rows * cols,
                found: inside.len(),
            });
        }
        let count = inside.iter().filter(|b| **b).count();
        if count == 0 || count == inside.len() {
            return Err(Error::InvalidParameter {
                name: "support",
                reason: "mask needs at least one pixel inside and one outside".into(),
            });
        }
        Ok(Self { rows, cols, inside })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_shape(rows, cols)?;
        let inside = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self::new(rows, cols, inside)
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

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.inside[row * self.cols + col]
    }

    pub fn count_inside(&self) -> usize {
        self.inside.iter().filter(|b| **b).count()
    }

    /// Copy of `g` with every pixel outside the support set to zero.
    pub fn restrict(&self, g: &ComplexField) -> Result<ComplexField> {
        check_same_shape(g.shape(), self.shape())?;
        let samples = g
            .samples()
            .iter()
            .zip(&self.inside)
            .map(|(&z, &inside)| if inside { z } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(g.with_samples(samples))
    }
}

/// Form of the HIO update outside the support.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HioVariant {
    /// g′ − β·g: feedback subtracted from the projected iterate.
    PaperExact,
    /// g − β·g′, Fienup's standard form.
    #[default]
    FienupClassic,
}

/// How `error_metric` aligns the iterate with the truth before correlating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Registration {
    /// Plain inner product |Σ gₙ·g*|.
    None,
    /// Best circular shift of the cross-correlation. The twin of a centered
    /// support sits one pixel off when window and extent share parity, so this
    /// is the default.
    #[default]
    CircularShift,
}

/// Which pixels set the length t·‖f‖₂ of a TV descent step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepNorm {
    /// Norm of the support pixels, the ones the step moves.
    #[default]
    Support,
    /// Norm of the whole window, including the HIO feedback outside.
    Window,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub beta: f64,
    pub t: f64,
    pub zeta_rel_tol: f64,
    pub max_outer_iters: usize,
    pub max_tv_subiters: usize,
    pub seed: u64,
    pub hio_variant: HioVariant,
    pub registration: Registration,
    pub smoothing: Smoothing,
    pub step_norm: StepNorm,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            beta: 0.9,
            t: 0.005,
            zeta_rel_tol: 0.005,
            max_outer_iters: 200,
            max_tv_subiters: 200,
            seed: 0,
            hio_variant: HioVariant::FienupClassic,
            registration: Registration::CircularShift,
            smoothing: Smoothing::Relative(1e-8),
            step_norm: StepNorm::Support,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if !(self.zeta_rel_tol > 0.0 && self.zeta_rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "zeta_rel_tol",
                reason: format!("must lie in (0, 1), got {}", self.zeta_rel_tol),
            });
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_outer_iters",
                reason: "at least one iteration is required".into(),
            });
        }
        if self.max_tv_subiters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_tv_subiters",
                reason: "sub-iteration cap must be positive".into(),
            });
        }
        self.tv_params().map(|_| ())
    }

    pub fn tv_params(&self) -> Result<TvParams> {
        TvParams::new(self.t)?.with_smoothing(self.smoothing)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.5 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must lie in (0.5, 1), got {beta}"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// Complexity of the iterate at the end of the iteration.
    pub zeta: f64,
    /// Complexity entering the TV sub-loop; `None` for plain HIO.
    pub zeta_entry: Option<f64>,
    /// Error of the support-restricted iterate, when a truth was given.
    pub error_sq: Option<f64>,
    pub tv: f64,
    pub tv_substeps: usize,
    /// The sub-loop stopped on its cap while still above the band.
    pub cap_hit: bool,
    /// Wall time since the run started.
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    /// ζ estimated from the magnitude data (complexity-guided runs only).
    pub zeta_target: Option<f64>,
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn final_error_sq(&self) -> Option<f64> {
        self.last().and_then(|r| r.error_sq)
    }
}

/// Result of one complexity-guided TV sub-loop.
#[derive(Clone, Debug)]
pub struct TvSubloop {
    pub field: ComplexField,
    pub substeps: usize,
    pub zeta_entry: f64,
    pub zeta_exit: f64,
    pub cap_hit: bool,
}

/// Replaces the spectrum magnitude of `g` by `m`, keeping its phase.
/// Zero spectral samples are given phase 0.
pub fn fourier_project(g: &ComplexField, m: &MagnitudeData) -> Result<ComplexField> {
    check_same_shape(g.shape(), m.shape())?;
    let mut spectrum = g.dft2();
    for (z, &mag) in spectrum.samples_mut().iter_mut().zip(m.values()) {
        let norm = z.norm();
        *z = if norm > 0.0 {
            *z * (mag / norm)
        } else {
            Complex64::new(mag, 0.0)
        };
    }
    Ok(spectrum.idft2())
}

/// HIO object-domain update: `g_proj` inside the support, negative feedback outside.
pub fn hio_update(
    g_prev: &ComplexField,
    g_proj: &ComplexField,
    support: &SupportMask,
    beta: f64,
    variant: HioVariant,
) -> Result<ComplexField> {
    check_same_shape(g_prev.shape(), g_proj.shape())?;
    check_same_shape(g_prev.shape(), support.shape())?;
    check_beta(beta)?;
    let samples = g_prev
        .samples()
        .iter()
        .zip(g_proj.samples())
        .zip(support.inside())
        .map(|((&prev, &proj), &inside)| match (inside, variant) {
            (true, _) => proj,
            (false, HioVariant::PaperExact) => proj - prev * beta,
            (false, HioVariant::FienupClassic) => prev - proj * beta,
        })
        .collect();
    Ok(g_proj.with_samples(samples))
}

/// TV descent restricted to the support, stopped by complexity.
///
/// The unit direction is computed on the full field and then masked; the step
/// length follows `cfg.step_norm`. Steps
/// continue while ζ is above the band's upper edge and the cap is not hit;
/// a step that lands below the band is kept. A field with no TV gradient is
/// returned unchanged.
pub fn complexity_guided_tv(
    g: &ComplexField,
    support: &SupportMask,
    zeta_target: f64,
    cfg: &RunConfig,
) -> Result<TvSubloop> {
    check_same_shape(g.shape(), support.shape())?;
    let band = complexity_tolerance_band(zeta_target, cfg.zeta_rel_tol)?;
    let params = cfg.tv_params()?;

    let mut field = g.clone();
    let zeta_entry = complexity_image(&field);
    let mut zeta = zeta_entry;
    let mut substeps = 0;
    while zeta > band.high && substeps < cfg.max_tv_subiters {
        let direction = match tv_unit_direction(&field, &params) {
            Ok(u) => u,
            Err(Error::ZeroGradient) => break,
            Err(e) => return Err(e),
        };
        let norm = match cfg.step_norm {
            StepNorm::Support => field
                .samples()
                .iter()
                .zip(support.inside())
                .filter(|(_, &inside)| inside)
                .map(|(z, _)| z.norm_sqr())
                .sum::<f64>()
                .sqrt(),
            StepNorm::Window => field.norm(),
        };
        let step = params.step_scale_t * norm;
        for ((z, d), &inside) in field
            .samples_mut()
            .iter_mut()
            .zip(direction.samples())
            .zip(support.inside())
        {
            if inside {
                *z -= d * step;
            }
        }
        substeps += 1;
        zeta = complexity_image(&field);
    }
    Ok(TvSubloop {
        field,
        substeps,
        zeta_entry,
        zeta_exit: zeta,
        cap_hit: zeta > band.high && substeps == cfg.max_tv_subiters,
    })
}

/// Plain HIO for `cfg.max_outer_iters` iterations.
pub fn run_hio(
    m: &MagnitudeData,
    support: &SupportMask,
    cfg: &RunConfig,
    init: &ComplexField,
    truth: Option<&ComplexField>,
) -> Result<(ComplexField, IterationTrace)> {
    run(m, support, cfg, init, truth, false)
}

/// Complexity-guided phase retrieval: HIO followed by a complexity-stopped
/// TV sub-loop in every iteration.
pub fn run_cgpr(
    m: &MagnitudeData,
    support: &SupportMask,
    cfg: &RunConfig,
    init: &ComplexField,
    truth: Option<&ComplexField>,
) -> Result<(ComplexField, IterationTrace)> {
    run(m, support, cfg, init, truth, true)
}

fn run(
    m: &MagnitudeData,
    support: &SupportMask,
    cfg: &RunConfig,
    init: &ComplexField,
    truth: Option<&ComplexField>,
    guided: bool,
) -> Result<(ComplexField, IterationTrace)> {
    cfg.validate()?;
    check_same_shape(init.shape(), m.shape())?;
    check_same_shape(init.shape(), support.shape())?;
    if let Some(t) = truth {
        check_same_shape(init.shape(), t.shape())?;
        if t.power() == 0.0 {
            return Err(Error::ZeroTruth);
        }
    }

    let zeta_target = if guided {
        let z = complexity_fourier(m);
        if z <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "magnitude",
                reason: "data complexity is zero; nothing to guide towards".into(),
            });
        }
        Some(z)
    } else {
        None
    };

    let start = Instant::now();
    let mut g = init.clone();
    let mut trace = IterationTrace {
        zeta_target,
        records: Vec::with_capacity(cfg.max_outer_iters),
    };
    for iter in 1..=cfg.max_outer_iters {
        let projected = fourier_project(&g, m)?;
        let updated = hio_update(&g, &projected, support, cfg.beta, cfg.hio_variant)?;
        let (next, zeta, zeta_entry, substeps, cap_hit) = match zeta_target {
            Some(target) => {
                let sub = complexity_guided_tv(&updated, support, target, cfg)?;
                (sub.field, sub.zeta_exit, Some(sub.zeta_entry), sub.substeps, sub.cap_hit)
            }
            None => {
                let z = complexity_image(&updated);
                (updated, z, None, 0, false)
            }
        };
        g = next;
        let error_sq = match truth {
            Some(t) => Some(error_metric(&support.restrict(&g)?, t, cfg.registration)?),
            None => None,
        };
        trace.records.push(IterationRecord {
            iter,
            zeta,
            zeta_entry,
            error_sq,
            tv: tv(&g),
            tv_substeps: substeps,
            cap_hit,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok((g, trace))
}

/// Twin-aware normalized object error, blind to global phase.
///
/// E²(h) = (Σ|h|² + Σ|g|² − 2·corr(h, g)) / Σ|g|², minimized over the iterate
/// and its twin.
pub fn error_metric(g_n: &ComplexField, truth: &ComplexField, registration: Registration) -> Result<f64> {
    check_same_shape(g_n.shape(), truth.shape())?;
    let truth_power = truth.power();
    if truth_power == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let single = |h: &ComplexField| -> Result<f64> {
        let corr = match registration {
            Registration::None => h.inner(truth)?.norm(),
            Registration::CircularShift => {
                let a = h.dft2();
                let b = truth.dft2();
                a.zip_map(&b, |x, y| x * y.conj())?
                    .idft2()
                    .samples()
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            }
        };
        Ok(((h.power() + truth_power - 2.0 * corr) / truth_power).max(0.0))
    };
    Ok(single(g_n)?.min(single(&twin(g_n))?))
}

/// g₀ = exp(iθ₀) with θ₀ uniform on [0, 2π) at every pixel of the window.
pub fn random_phase_init(rows: usize, cols: usize, seed: u64) -> Result<ComplexField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexField::from_fn(rows, cols, |_, _| Complex64::from_polar(1.0, rng.random_range(0.0..TAU)))
}

/// The window-wide random-phase draw for `seed`, zeroed outside the support.
/// Inside pixels carry the same phases as `random_phase_init` with that seed.
pub fn random_phase_init_on(support: &SupportMask, seed: u64) -> Result<ComplexField> {
    support.restrict(&random_phase_init(support.rows(), support.cols(), seed)?)
}

/// Unit-amplitude, zero-phase starting guess over the whole window.
pub fn constant_init(rows: usize, cols: usize) -> Result<ComplexField> {
    ComplexField::new(rows, cols, vec![Complex64::new(1.0, 0.0); rows * cols])
}
