//! Forward model: Fourier magnitudes of an object, optionally with photon
//! shot noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::complexity::MagnitudeData;
use crate::error::{Error, Result};
use crate::field::ComplexField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    /// Mean photon count per detector pixel.
    pub photons_per_pixel: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(photons_per_pixel: f64, seed: u64) -> Result<Self> {
        if !(photons_per_pixel.is_finite() && photons_per_pixel > 0.0) {
            return Err(Error::InvalidParameter {
                name: "photons",
                reason: format!("must be positive, got {photons_per_pixel}"),
            });
        }
        Ok(Self {
            photons_per_pixel,
            seed,
        })
    }
}

/// Noiseless |dft2(g)|.
pub fn forward_magnitude(g: &ComplexField) -> MagnitudeData {
    MagnitudeData::from_spectrum(&g.dft2())
}

/// Poisson-corrupted magnitudes.
///
/// Intensities are scaled so their mean equals `photons_per_pixel`, counts are
/// drawn per pixel, and the result is scaled back so the expected intensity
/// matches the input.
pub fn apply_poisson(m: &MagnitudeData, spec: &NoiseSpec) -> Result<MagnitudeData> {
    let intensities: Vec<f64> = m.values().iter().map(|v| v * v).collect();
    let mean = intensities.iter().sum::<f64>() / intensities.len() as f64;
    if mean <= 0.0 {
        return Err(Error::AllZeroInput);
    }
    let scale = spec.photons_per_pixel / mean;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = intensities
        .iter()
        .map(|&i| {
            let lambda = scale * i;
            if lambda <= 0.0 {
                return Ok(0.0);
            }
            let dist = Poisson::new(lambda).map_err(|e| Error::InvalidParameter {
                name: "photons",
                reason: format!("Poisson rate {lambda} rejected: {e}"),
            })?;
            let count: f64 = dist.sample(&mut rng);
            Ok((count / scale).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    MagnitudeData::new(m.rows(), m.cols(), values)?.with_spacing(m.dx(), m.dy())
}
