use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fim::{crb_from_fim, monte_carlo_fim};
use crate::model::{Configuration, ExponentialFamily};
use crate::samplers::{chain_rng, derive_seed, ChainSpec, GibbsKernel, SamplerKind};

use super::{exchange_posterior, ml_from_samples, Bandwidth, ExchangeConfig};

/// A point estimator of a scalar θ from one observed field.
pub trait ThetaEstimator: Sync {
    fn estimate(
        &self,
        model: &dyn ExponentialFamily,
        z_obs: &Configuration,
        replicate: usize,
        seed: u64,
    ) -> Result<f64>;
}

/// Exchange-algorithm posterior followed by kernel-smoothed maximization.
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeMl {
    pub exchange: ExchangeConfig,
    pub bandwidth: Bandwidth,
}

impl ThetaEstimator for ExchangeMl {
    fn estimate(
        &self,
        model: &dyn ExponentialFamily,
        z_obs: &Configuration,
        _replicate: usize,
        seed: u64,
    ) -> Result<f64> {
        let run = exchange_posterior(model, z_obs, &self.exchange, seed)?;
        Ok(ml_from_samples(&run, self.bandwidth)?.theta_hat)
    }
}

impl<F> ThetaEstimator for F
where
    F: Fn(usize) -> f64 + Sync,
{
    fn estimate(
        &self,
        _model: &dyn ExponentialFamily,
        _z_obs: &Configuration,
        replicate: usize,
        _seed: u64,
    ) -> Result<f64> {
        Ok(self(replicate))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkConfig {
    pub n_ml: usize,
    /// Gibbs sweeps from a uniform start used to draw each observed field.
    pub field_sweeps: usize,
    /// Chain used for the Monte Carlo CRB at the true θ.
    pub crb_sampler: SamplerKind,
    pub crb_burn: usize,
    pub crb_n_mc: usize,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n_ml: 100,
            field_sweeps: 1000,
            crb_sampler: SamplerKind::GibbsSystematic,
            crb_burn: 1000,
            crb_n_mc: 100_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatorBenchmark {
    pub theta_true: f64,
    pub n_ml: usize,
    pub estimates: Vec<f64>,
    pub empirical_variance: f64,
    pub empirical_bias: f64,
    pub crb_at_theta: f64,
    /// Variance below `CRB · (1 − 3 sqrt(2 / N_ML))`, i.e. beyond what
    /// sampling noise in the variance estimate explains.
    pub below_crb: bool,
}

/// Mean and `(n − 1)`-denominator variance.
pub fn sample_mean_variance(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InsufficientSamples {
            got: xs.len(),
            min: 2,
        });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var))
}

/// Draws one field from `f_θ` by running Gibbs sweeps from a uniform start.
pub fn simulate_field<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: f64,
    sweeps: usize,
    seed: u64,
) -> Result<Configuration> {
    let mut rng = chain_rng(seed);
    let mut z = Configuration::random(model.num_sites(), model.num_labels(), &mut rng);
    let mut stat = model.sufficient_statistic(&z)?;
    let mut kernel = GibbsKernel::new(model, &[theta])?;
    for _ in 0..sweeps {
        kernel.systematic_sweep(z.labels_mut(), &mut stat, &mut rng);
    }
    Ok(z)
}

/// Empirical variance and bias of `estimator` over `n_ml` fields simulated at
/// `theta_true`, alongside the Monte Carlo CRB at `theta_true`.
pub fn replicate_benchmark<M, E>(
    model: &M,
    theta_true: f64,
    config: &BenchmarkConfig,
    estimator: &E,
    seed: u64,
) -> Result<EstimatorBenchmark>
where
    M: ExponentialFamily + Sized,
    E: ThetaEstimator + ?Sized,
{
    if config.n_ml < 2 {
        return Err(Error::InsufficientSamples {
            got: config.n_ml,
            min: 2,
        });
    }
    if model.stat_dim() != 1 {
        return Err(Error::InvalidParameter(
            "benchmark supports scalar-parameter models only".into(),
        ));
    }
    let estimates = (0..config.n_ml)
        .into_par_iter()
        .map(|i| {
            let field = simulate_field(model, theta_true, config.field_sweeps, derive_seed(seed, 2 * i as u64))?;
            estimator.estimate(model, &field, i, derive_seed(seed, 2 * i as u64 + 1))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, variance) = sample_mean_variance(&estimates)?;

    let spec = ChainSpec::new(
        config.crb_sampler,
        config.crb_burn,
        config.crb_n_mc,
        derive_seed(seed, u64::MAX),
    );
    let (fim, _) = monte_carlo_fim(model, &[theta_true], &spec)?;
    let crb = crb_from_fim(&fim)?.crb[(0, 0)];
    let floor = crb * (1.0 - 3.0 * (2.0 / config.n_ml as f64).sqrt());

    Ok(EstimatorBenchmark {
        theta_true,
        n_ml: config.n_ml,
        estimates,
        empirical_variance: variance,
        empirical_bias: mean - theta_true,
        crb_at_theta: crb,
        below_crb: variance < floor,
    })
}
