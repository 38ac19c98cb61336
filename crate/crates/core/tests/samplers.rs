use mrf_crb::fim::effective_sample_size;
use mrf_crb::lattice::Boundary;
use mrf_crb::model::Configuration;
use mrf_crb::oracle::{enumerate_moments, state_probabilities, DEFAULT_ENUMERATION_CAP};
use mrf_crb::prelude::*;
use mrf_crb::samplers::{
    chain_rng, gibbs_sweep, random_scan_sweep, read_chain_dump, swendsen_wang_step,
    write_chain_dump, SwendsenWang,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(model: &PottsModel, theta: f64, kind: SamplerKind, draws: usize, seed: u64) -> f64 {
    let k = model.num_labels();
    let probs = state_probabilities(model, &[theta], DEFAULT_ENUMERATION_CAP).unwrap();
    let mut rng = chain_rng(seed);
    let mut z = Configuration::random(model.num_sites(), k, &mut rng);
    let mut counts = vec![0u64; probs.len()];
    for t in 0..(draws + 10) * 4 {
        match kind {
            SamplerKind::GibbsSystematic => gibbs_sweep(model, &[theta], &mut z, &mut rng).unwrap(),
            SamplerKind::GibbsRandomScan => {
                random_scan_sweep(model, &[theta], &mut z, &mut rng).unwrap()
            }
            SamplerKind::SwendsenWang => swendsen_wang_step(model, theta, &mut z, &mut rng).unwrap(),
        }
        if t >= 40 && t % 4 == 0 {
            counts[z.state_index(k) as usize] += 1;
        }
    }
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| (c as f64 - n as f64 * p).powi(2) / (n as f64 * p))
        .sum();
    1.0 - ChiSquared::new((probs.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn every_kernel_targets_the_density() {
    let model = PottsModel::lattice(2, 2, Boundary::Free, 3).unwrap();
    for (i, kind) in [
        SamplerKind::GibbsSystematic,
        SamplerKind::GibbsRandomScan,
        SamplerKind::SwendsenWang,
    ]
    .into_iter()
    .enumerate()
    {
        let p = chi_square_p(&model, 0.6, kind, 100_000, 40 + i as u64);
        assert!(p > 1e-3, "{kind}: p = {p}");
    }
}

#[test]
fn torus_mean_within_three_standard_errors() {
    let model = PottsModel::lattice(3, 3, Boundary::Toroidal, 2).unwrap();
    let theta = 0.7;
    let exact = enumerate_moments(&model, &[theta]).unwrap().mean_stat[0];
    for kind in [SamplerKind::GibbsSystematic, SamplerKind::SwendsenWang] {
        let spec = ChainSpec::new(kind, 500, 50_000, 8);
        let chain = run_chain(&model, &[theta], &spec, |_| {}).unwrap();
        let xs = chain.component(0);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let ess = effective_sample_size(&xs).unwrap().value;
        let se = (var / ess).sqrt();
        assert!((mean - exact).abs() < 3.0 * se, "{kind}: {mean} vs {exact} (se {se})");
    }
}

#[test]
fn bond_probability_formula() {
    let model = PottsModel::lattice(4, 4, Boundary::Free, 2).unwrap();
    for theta in [0.0, 0.3, 2.0] {
        let sw = SwendsenWang::new(&model, theta).unwrap();
        assert!((sw.bond_probability() - (1.0 - (-theta).exp())).abs() < 1e-15);
    }
    assert!(SwendsenWang::new(&model, -0.1).is_err());
}

#[test]
fn swendsen_wang_at_zero_coupling_is_independent() {
    // No bonds form, so every site is its own cluster and gets a fresh label.
    let model = PottsModel::lattice(5, 5, Boundary::Toroidal, 3).unwrap();
    let mut sw = SwendsenWang::new(&model, 0.0).unwrap();
    let mut rng = chain_rng(2);
    let mut labels = vec![0u16; 25];
    assert_eq!(sw.step(&mut labels, &mut rng), 25);
}

#[test]
fn chains_are_reproducible_and_seed_sensitive() {
    let model = PottsModel::lattice(8, 8, Boundary::Toroidal, 3).unwrap();
    for kind in [
        SamplerKind::GibbsSystematic,
        SamplerKind::GibbsRandomScan,
        SamplerKind::SwendsenWang,
    ] {
        let run = |seed| {
            let spec = ChainSpec::new(kind, 20, 200, seed);
            run_chain(&model, &[0.9], &spec, |_| {}).unwrap()
        };
        let (a, b, c) = (run(5), run(5), run(6));
        assert_eq!(a.component(0), b.component(0));
        assert_eq!(a.final_config, b.final_config);
        assert_ne!(a.component(0), c.component(0));
    }
}

#[test]
fn running_statistic_matches_recomputation() {
    let model = PottsModel::lattice(6, 5, Boundary::Free, 4).unwrap();
    let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 50, 3);
    let chain = run_chain(&model, &[1.2], &spec, |_| {}).unwrap();
    let last = chain.sample(chain.n_mc() - 1)[0];
    assert_eq!(last, model.sufficient_statistic(&chain.final_config).unwrap()[0]);
}

#[test]
fn consumer_sees_each_recorded_sample() {
    let model = PottsModel::lattice(4, 4, Boundary::Toroidal, 2).unwrap();
    let mut seen = Vec::new();
    let spec = ChainSpec::new(SamplerKind::SwendsenWang, 5, 30, 1);
    let chain = run_chain(&model, &[0.5], &spec, |s| seen.push(s[0])).unwrap();
    assert_eq!(seen, chain.component(0));
}

#[test]
fn given_initial_state_is_used() {
    let model = PottsModel::lattice(4, 4, Boundary::Toroidal, 2).unwrap();
    let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 2, 1)
        .with_init(InitialState::Given(Configuration::constant(16, 1)));
    // At very strong coupling an ordered start stays ordered.
    let chain = run_chain(&model, &[20.0], &spec, |_| {}).unwrap();
    assert_eq!(chain.sample(0)[0], 32.0);

    let bad = ChainSpec::new(SamplerKind::GibbsSystematic, 0, 2, 1)
        .with_init(InitialState::Given(Configuration::constant(15, 0)));
    assert!(run_chain(&model, &[0.1], &bad, |_| {}).is_err());
}

#[test]
fn chain_dump_round_trip() {
    let model = PottsModel::lattice(4, 4, Boundary::Free, 3).unwrap();
    let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 5, 25, 9);
    let chain = run_chain(&model, &[0.4], &spec, |_| {}).unwrap();
    let mut buf = Vec::new();
    write_chain_dump(&mut buf, &model.describe(), &[0.4], &chain).unwrap();
    let dump = read_chain_dump(buf.as_slice()).unwrap();
    assert_eq!(dump.get("seed"), Some("9"));
    assert_eq!(dump.get("n_mc"), Some("25"));
    let rows: Vec<f64> = dump.rows.iter().map(|r| r[0]).collect();
    assert_eq!(rows, chain.component(0));
}
