use rand::Rng;

use crate::error::Result;
use crate::model::{Configuration, ExponentialFamily};

/// Single-site Gibbs kernel with preallocated scratch space.
///
/// The running statistic passed to the sweep methods is kept in sync with
/// the labels through the per-site deltas, so a sweep costs
/// `O(N · K · M · degree)` and never recomputes `Φ` from scratch.
pub struct GibbsKernel<'a, M: ExponentialFamily + ?Sized> {
    model: &'a M,
    theta: Vec<f64>,
    deltas: Vec<f64>,
    probs: Vec<f64>,
}

impl<'a, M: ExponentialFamily + ?Sized> GibbsKernel<'a, M> {
    pub fn new(model: &'a M, theta: &[f64]) -> Result<Self> {
        model.validate_theta(theta)?;
        Ok(Self {
            model,
            theta: theta.to_vec(),
            deltas: vec![0.0; model.num_labels() * model.stat_dim()],
            probs: vec![0.0; model.num_labels()],
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Resamples one site from its full conditional and updates `stat`.
    #[inline]
    pub fn update_site<R: Rng + ?Sized>(
        &mut self,
        labels: &mut [u16],
        site: usize,
        stat: &mut [f64],
        rng: &mut R,
    ) {
        self.model
            .conditional_into(&self.theta, labels, site, &mut self.deltas, &mut self.probs);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.probs.len() - 1;
        for (k, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = k;
                break;
            }
        }
        if chosen != labels[site] as usize {
            let m = stat.len();
            for (s, d) in stat.iter_mut().zip(&self.deltas[chosen * m..(chosen + 1) * m]) {
                *s += d;
            }
            labels[site] = chosen as u16;
        }
    }

    /// One raster-order sweep: every site updated exactly once.
    pub fn systematic_sweep<R: Rng + ?Sized>(
        &mut self,
        labels: &mut [u16],
        stat: &mut [f64],
        rng: &mut R,
    ) {
        for site in 0..labels.len() {
            self.update_site(labels, site, stat, rng);
        }
    }

    /// `N` updates at uniformly chosen sites.
    pub fn random_scan_sweep<R: Rng + ?Sized>(
        &mut self,
        labels: &mut [u16],
        stat: &mut [f64],
        rng: &mut R,
    ) {
        let n = labels.len();
        for _ in 0..n {
            let site = rng.random_range(0..n);
            self.update_site(labels, site, stat, rng);
        }
    }
}

/// Applies one systematic-scan Gibbs sweep to `config` in place.
pub fn gibbs_sweep<M, R>(
    model: &M,
    theta: &[f64],
    config: &mut Configuration,
    rng: &mut R,
) -> Result<()>
where
    M: ExponentialFamily + ?Sized,
    R: Rng + ?Sized,
{
    let mut stat = model.sufficient_statistic(config)?;
    let mut kernel = GibbsKernel::new(model, theta)?;
    kernel.systematic_sweep(config.labels_mut(), &mut stat, rng);
    Ok(())
}

/// Applies `N` random-site Gibbs updates to `config` in place.
pub fn random_scan_sweep<M, R>(
    model: &M,
    theta: &[f64],
    config: &mut Configuration,
    rng: &mut R,
) -> Result<()>
where
    M: ExponentialFamily + ?Sized,
    R: Rng + ?Sized,
{
    let mut stat = model.sufficient_statistic(config)?;
    let mut kernel = GibbsKernel::new(model, theta)?;
    kernel.random_scan_sweep(config.labels_mut(), &mut stat, rng);
    Ok(())
}
