use serde::Serialize;

use crate::error::{Error, Result};

use super::PosteriorRun;

pub const KDE_GRID_POINTS: usize = 512;

/// Smallest sample accepted by [`ml_from_samples`].
pub const MIN_KDE_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Bandwidth {
    /// Silverman's rule `1.06 σ̂ n^{-1/5}`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlEstimate {
    pub theta_hat: f64,
    pub bandwidth: f64,
    /// All samples were identical; `theta_hat` is that value.
    pub degenerate: bool,
}

pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    1.06 * var.sqrt() * n.powf(-0.2)
}

/// Argmax of a Gaussian kernel density estimate over a 512-point grid on
/// `[lo, hi]`. Ties go to the smaller grid point.
pub fn kde_argmax(samples: &[f64], lo: f64, hi: f64, bandwidth: Bandwidth) -> Result<MlEstimate> {
    if samples.len() < MIN_KDE_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            min: MIN_KDE_SAMPLES,
        });
    }
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty grid range [{lo}, {hi}]")));
    }
    if samples.iter().all(|&s| s == samples[0]) {
        return Ok(MlEstimate {
            theta_hat: samples[0],
            bandwidth: 0.0,
            degenerate: true,
        });
    }
    let bw = match bandwidth {
        Bandwidth::Auto => silverman_bandwidth(samples),
        Bandwidth::Fixed(b) if b > 0.0 && b.is_finite() => b,
        Bandwidth::Fixed(b) => {
            return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {b}")))
        }
    };
    let inv = 1.0 / bw;
    let step = (hi - lo) / (KDE_GRID_POINTS - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for i in 0..KDE_GRID_POINTS {
        let x = lo + step * i as f64;
        let density: f64 = samples
            .iter()
            .map(|s| {
                let u = (x - s) * inv;
                (-0.5 * u * u).exp()
            })
            .sum();
        if density > best.0 {
            best = (density, i);
        }
    }
    Ok(MlEstimate {
        theta_hat: lo + step * best.1 as f64,
        bandwidth: bw,
        degenerate: false,
    })
}

/// Maximum-likelihood estimate from posterior samples drawn under a flat prior.
pub fn ml_from_samples(run: &PosteriorRun, bandwidth: Bandwidth) -> Result<MlEstimate> {
    kde_argmax(&run.theta_samples, run.theta_min, run.theta_max, bandwidth)
}
