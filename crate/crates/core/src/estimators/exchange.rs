use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, ExponentialFamily};
use crate::samplers::{chain_rng, GibbsKernel};

/// Acceptance rates below this are flagged as a stuck chain.
pub const LOW_ACCEPTANCE: f64 = 0.001;

#[derive(Debug, Clone, Serialize)]
pub struct ExchangeConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_samples: usize,
    pub n_burn: usize,
    /// Full Gibbs sweeps applied to the auxiliary field per proposal.
    pub aux_moves: usize,
    pub proposal_sd: f64,
    /// Starting value of the θ chain; the middle of the prior range if unset.
    pub init_theta: Option<f64>,
}

impl ExchangeConfig {
    /// Uniform prior on `[0, θ_max]` with 250 burn-in iterations, 10
    /// auxiliary sweeps, 1000 recorded samples and proposal sd 0.05.
    pub fn with_range(theta_min: f64, theta_max: f64) -> Self {
        Self {
            theta_min,
            theta_max,
            n_samples: 1000,
            n_burn: 250,
            aux_moves: 10,
            proposal_sd: 0.05,
            init_theta: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta_min < self.theta_max) || !self.theta_min.is_finite() || !self.theta_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need theta_min < theta_max, got [{}, {}]",
                self.theta_min, self.theta_max
            )));
        }
        if !(self.proposal_sd > 0.0) || !self.proposal_sd.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "proposal_sd must be positive, got {}",
                self.proposal_sd
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if let Some(t) = self.init_theta {
            if !(self.theta_min..=self.theta_max).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "init_theta {t} outside the prior range"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorRun {
    pub theta_samples: Vec<f64>,
    pub acceptance_rate: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub aux_moves: usize,
    pub seed: u64,
    pub low_acceptance: bool,
}

/// Log acceptance ratio of the exchange move `θ → θ'` given the observed
/// and auxiliary statistics. The partition functions cancel.
pub fn exchange_log_acceptance(theta: f64, proposal: f64, phi_obs: f64, phi_aux: f64) -> f64 {
    (proposal - theta) * (phi_obs - phi_aux)
}

/// Exchange-algorithm sampler for the posterior of a scalar θ under a
/// uniform prior, with the auxiliary field approximated by Gibbs sweeps
/// started from the observation.
pub fn exchange_posterior<M: ExponentialFamily + ?Sized>(
    model: &M,
    z_obs: &Configuration,
    config: &ExchangeConfig,
    seed: u64,
) -> Result<PosteriorRun> {
    config.validate()?;
    if model.stat_dim() != 1 {
        return Err(Error::InvalidParameter(
            "exchange sampler supports scalar-parameter models only".into(),
        ));
    }
    let phi_obs = model.sufficient_statistic(z_obs)?[0];
    let mut rng = chain_rng(seed);
    let step = Normal::new(0.0, config.proposal_sd)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let mut theta = config
        .init_theta
        .unwrap_or(0.5 * (config.theta_min + config.theta_max));
    let mut aux = z_obs.clone();
    let mut aux_stat = [0.0];
    let total = config.n_burn + config.n_samples;
    let mut accepted = 0usize;
    let mut samples = Vec::with_capacity(config.n_samples);

    for iter in 0..total {
        let proposal = theta + step.sample(&mut rng);
        if (config.theta_min..=config.theta_max).contains(&proposal) {
            aux.labels_mut().copy_from_slice(z_obs.labels());
            aux_stat[0] = phi_obs;
            let mut kernel = GibbsKernel::new(model, &[proposal])?;
            for _ in 0..config.aux_moves {
                kernel.systematic_sweep(aux.labels_mut(), &mut aux_stat, &mut rng);
            }
            let log_alpha = exchange_log_acceptance(theta, proposal, phi_obs, aux_stat[0]);
            if log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha {
                theta = proposal;
                accepted += 1;
            }
        }
        if iter >= config.n_burn {
            samples.push(theta);
        }
    }

    let acceptance_rate = accepted as f64 / total as f64;
    Ok(PosteriorRun {
        theta_samples: samples,
        acceptance_rate,
        theta_min: config.theta_min,
        theta_max: config.theta_max,
        aux_moves: config.aux_moves,
        seed,
        low_acceptance: acceptance_rate < LOW_ACCEPTANCE,
    })
}
