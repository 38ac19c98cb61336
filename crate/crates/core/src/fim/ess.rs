use serde::Serialize;

use crate::error::{Error, Result};

/// Shortest series accepted by [`effective_sample_size`].
pub const MIN_ESS_LEN: usize = 100;

/// Largest lag summed by the autocorrelation estimator.
pub const MAX_ESS_LAG: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ess {
    pub value: f64,
    /// Zero-variance series; `value` is set to the series length.
    pub degenerate: bool,
    /// Number of autocorrelation lags that entered the sum.
    pub lags_used: usize,
}

/// Lag-`k` autocovariance with the `1/N` normalization.
pub fn autocovariance(centered: &[f64], lag: usize) -> f64 {
    let n = centered.len();
    if lag >= n {
        return 0.0;
    }
    let s: f64 = centered[..n - lag]
        .iter()
        .zip(&centered[lag..])
        .map(|(a, b)| a * b)
        .sum();
    s / n as f64
}

/// Effective sample size from the autocorrelation function, truncated with
/// Geyer's initial positive sequence.
///
/// Autocorrelations are grouped in pairs `Γ_m = ρ_{2m} + ρ_{2m+1}` and
/// summed until the first non-positive pair (or lag `min(N/2, 10⁴)`);
/// then `ESS = N / (2 Σ Γ_m − 1)`, clamped to `(0, N]`.
pub fn effective_sample_size(series: &[f64]) -> Result<Ess> {
    let n = series.len();
    if n < MIN_ESS_LEN {
        return Err(Error::InsufficientSamples {
            got: n,
            min: MIN_ESS_LEN,
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("series contains non-finite values".into()));
    }
    let nf = n as f64;
    if series.iter().all(|&x| x == series[0]) {
        return Ok(Ess {
            value: nf,
            degenerate: true,
            lags_used: 0,
        });
    }

    let mean = series.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let gamma0 = autocovariance(&centered, 0);
    if gamma0 <= 0.0 {
        return Ok(Ess {
            value: nf,
            degenerate: true,
            lags_used: 0,
        });
    }

    let max_lag = (n / 2).min(MAX_ESS_LAG);
    let mut pair_sum = 0.0;
    let mut lag = 0;
    while lag + 1 <= max_lag {
        let even = autocovariance(&centered, lag) / gamma0;
        let odd = autocovariance(&centered, lag + 1) / gamma0;
        let pair = even + odd;
        if pair <= 0.0 {
            break;
        }
        pair_sum += pair;
        lag += 2;
    }
    let tau = 2.0 * pair_sum - 1.0;
    let value = if tau > 1.0 { nf / tau } else { nf };
    Ok(Ess {
        value,
        degenerate: false,
        lags_used: lag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn iid_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ess = effective_sample_size(&x).unwrap();
        let ratio = ess.value / x.len() as f64;
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
        assert!(!ess.degenerate);
    }

    #[test]
    fn ar1_matches_integrated_time() {
        // τ_int of AR(1) is (1 + ρ)/(1 − ρ).
        let rho: f64 = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let scale = (1.0 - rho * rho).sqrt();
        let mut x = Vec::with_capacity(1_000_000);
        let mut v: f64 = StandardNormal.sample(&mut rng);
        for _ in 0..1_000_000 {
            let e: f64 = StandardNormal.sample(&mut rng);
            v = rho * v + scale * e;
            x.push(v);
        }
        let expected = (1.0 - rho) / (1.0 + rho);
        let ratio = effective_sample_size(&x).unwrap().value / x.len() as f64;
        assert!((ratio / expected - 1.0).abs() < 0.2, "ratio {ratio} vs {expected}");
    }

    #[test]
    fn constant_series_is_degenerate() {
        let ess = effective_sample_size(&[3.0; 500]).unwrap();
        assert!(ess.degenerate);
        assert_eq!(ess.value, 500.0);
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            effective_sample_size(&[1.0; 99]),
            Err(Error::InsufficientSamples { got: 99, min: 100 })
        ));
    }

    #[test]
    fn anticorrelated_series_clamped() {
        let x: Vec<f64> = (0..1000).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ess = effective_sample_size(&x).unwrap();
        assert!(ess.value > 0.0 && ess.value <= 1000.0);
    }
}
