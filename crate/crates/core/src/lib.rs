//! Complexity-guided phase retrieval.
//!
//! The complexity of an object, ζ = Σ(|∇ₓg|² + |∇_y g|²), can be read off its
//! Fourier magnitudes alone. [`solver::run_cgpr`] uses that number to decide
//! how many TV descent steps to take inside each HIO iteration, while
//! [`solver::run_hio`] is the unguided baseline.

pub mod complexity;
pub mod error;
pub mod field;
pub mod io;
pub mod measurement;
pub mod phantom;
pub mod solver;
pub mod sparsity;

#[cfg(test)]
mod testutil;

pub use complexity::{complexity_fourier, complexity_image, complexity_tolerance_band, MagnitudeData, ToleranceBand};
pub use error::{Error, Result};
pub use field::{ComplexField, GradientPair};
pub use measurement::{apply_poisson, forward_magnitude, NoiseSpec};
pub use phantom::{make_phantom, twin, Pattern, PhantomSpec};
pub use solver::{
    complexity_guided_tv, constant_init, error_metric, fourier_project, hio_update, random_phase_init,
    random_phase_init_on, run_cgpr, run_hio, HioVariant, IterationRecord, IterationTrace, Registration,
    RunConfig, StepNorm, SupportMask, TvSubloop,
};
pub use sparsity::{tv, tv_descent_step, tv_gradient, tv_unit_direction, Smoothing, TvParams};

pub use num_complex::Complex64;
