use crate::error::{Error, Result};
use crate::model::{Configuration, ExponentialFamily};

use super::gibbs::GibbsKernel;
use super::swendsen_wang::SwendsenWang;
use super::{chain_rng, ChainRng, SamplerKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    /// I.i.d. uniform labels drawn from the chain's own generator.
    UniformRandom,
    Given(Configuration),
}

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub sampler: SamplerKind,
    pub n_burn: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub init: InitialState,
}

impl ChainSpec {
    pub fn new(sampler: SamplerKind, n_burn: usize, n_mc: usize, seed: u64) -> Self {
        Self {
            sampler,
            n_burn,
            n_mc,
            seed,
            init: InitialState::UniformRandom,
        }
    }

    pub fn with_init(mut self, init: InitialState) -> Self {
        self.init = init;
        self
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    stat_dim: usize,
    /// Recorded `Φ(z^(t))`, row-major `n_mc x stat_dim`.
    stats: Vec<f64>,
    pub final_config: Configuration,
    pub seed: u64,
    pub n_burn: usize,
    pub sampler: SamplerKind,
}

impl ChainOutput {
    pub fn n_mc(&self) -> usize {
        self.stats.len() / self.stat_dim
    }

    pub fn stat_dim(&self) -> usize {
        self.stat_dim
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.stats[t * self.stat_dim..(t + 1) * self.stat_dim]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.stats.chunks_exact(self.stat_dim)
    }

    /// Trace of one statistic component.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.samples().map(|u| u[j]).collect()
    }
}

enum Kernel<'a, M: ExponentialFamily + ?Sized> {
    Gibbs(GibbsKernel<'a, M>, bool),
    Cluster(SwendsenWang<'a>),
}

impl<M: ExponentialFamily + ?Sized> Kernel<'_, M> {
    fn apply(&mut self, model: &M, labels: &mut [u16], stat: &mut [f64], rng: &mut ChainRng) {
        match self {
            Kernel::Gibbs(k, false) => k.systematic_sweep(labels, stat, rng),
            Kernel::Gibbs(k, true) => k.random_scan_sweep(labels, stat, rng),
            Kernel::Cluster(sw) => {
                sw.step(labels, rng);
                model.stat_into(labels, stat);
            }
        }
    }
}

/// Runs `n_burn + n_mc` kernel applications and records `Φ` after each of
/// the last `n_mc`, handing every recorded vector to `consumer` as well.
///
/// Output is a pure function of `(model, theta, spec)`.
pub fn run_chain<M, F>(
    model: &M,
    theta: &[f64],
    spec: &ChainSpec,
    mut consumer: F,
) -> Result<ChainOutput>
where
    M: ExponentialFamily + ?Sized,
    F: FnMut(&[f64]),
{
    if spec.n_mc < 2 {
        return Err(Error::InsufficientSamples {
            got: spec.n_mc,
            min: 2,
        });
    }
    model.validate_theta(theta)?;

    let mut rng = chain_rng(spec.seed);
    let mut config = match &spec.init {
        InitialState::UniformRandom => {
            Configuration::random(model.num_sites(), model.num_labels(), &mut rng)
        }
        InitialState::Given(z) => {
            model.validate(z)?;
            z.clone()
        }
    };

    let mut kernel = match spec.sampler {
        SamplerKind::GibbsSystematic => Kernel::Gibbs(GibbsKernel::new(model, theta)?, false),
        SamplerKind::GibbsRandomScan => Kernel::Gibbs(GibbsKernel::new(model, theta)?, true),
        SamplerKind::SwendsenWang => {
            let potts = model.as_potts().ok_or_else(|| {
                Error::InvalidParameter("Swendsen-Wang requires an Ising/Potts model".into())
            })?;
            Kernel::Cluster(SwendsenWang::new(potts, theta[0])?)
        }
    };

    let m = model.stat_dim();
    let mut stat = vec![0.0; m];
    model.stat_into(config.labels(), &mut stat);

    for _ in 0..spec.n_burn {
        kernel.apply(model, config.labels_mut(), &mut stat, &mut rng);
    }
    let mut stats = Vec::with_capacity(spec.n_mc * m);
    for _ in 0..spec.n_mc {
        kernel.apply(model, config.labels_mut(), &mut stat, &mut rng);
        consumer(&stat);
        stats.extend_from_slice(&stat);
    }

    Ok(ChainOutput {
        stat_dim: m,
        stats,
        final_config: config,
        seed: spec.seed,
        n_burn: spec.n_burn,
        sampler: spec.sampler,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::model::PottsModel;

    fn model() -> PottsModel {
        PottsModel::lattice(4, 4, Boundary::Toroidal, 2).unwrap()
    }

    #[test]
    fn minimal_chain_length() {
        let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 2, 1);
        let out = run_chain(&model(), &[0.7], &spec, |_| {}).unwrap();
        assert_eq!(out.n_mc(), 2);

        let short = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 1, 1);
        assert!(matches!(
            run_chain(&model(), &[0.7], &short, |_| {}),
            Err(Error::InsufficientSamples { got: 1, min: 2 })
        ));
    }

    #[test]
    fn same_seed_same_series() {
        for sampler in [
            SamplerKind::GibbsSystematic,
            SamplerKind::GibbsRandomScan,
            SamplerKind::SwendsenWang,
        ] {
            let spec = ChainSpec::new(sampler, 10, 500, 77);
            let a = run_chain(&model(), &[0.5], &spec, |_| {}).unwrap();
            let b = run_chain(&model(), &[0.5], &spec, |_| {}).unwrap();
            assert_eq!(a.stats, b.stats);
            assert_eq!(a.final_config, b.final_config);
        }
    }

    #[test]
    fn consumer_sees_every_sample() {
        let spec = ChainSpec::new(SamplerKind::SwendsenWang, 5, 300, 3);
        let mut seen = Vec::new();
        let out = run_chain(&model(), &[0.9], &spec, |u| seen.push(u[0])).unwrap();
        assert_eq!(seen, out.component(0));
    }

    #[test]
    fn final_statistic_matches_recompute() {
        let m = model();
        for sampler in [SamplerKind::GibbsSystematic, SamplerKind::SwendsenWang] {
            let spec = ChainSpec::new(sampler, 50, 200, 12);
            let out = run_chain(&m, &[0.8], &spec, |_| {}).unwrap();
            let last = out.sample(out.n_mc() - 1).to_vec();
            assert_eq!(last, m.sufficient_statistic(&out.final_config).unwrap());
        }
    }

    #[test]
    fn given_initial_state_is_validated() {
        let bad = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 10, 0)
            .with_init(InitialState::Given(Configuration::constant(5, 0)));
        assert!(run_chain(&model(), &[0.2], &bad, |_| {}).is_err());
    }
}
