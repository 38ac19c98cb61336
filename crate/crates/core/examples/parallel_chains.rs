//! Runs independent chains in parallel and merges their covariance
//! accumulators into one FIM estimate.

use rayon::prelude::*;

use mrf_crb::prelude::*;
use mrf_crb::samplers::derive_seed;

fn main() -> mrf_crb::Result<()> {
    let model = PottsModel::lattice(24, 24, Boundary::Toroidal, 2)?;
    let theta = 0.7;
    let chains = 4usize;

    let parts = (0..chains)
        .into_par_iter()
        .map(|i| {
            let spec = ChainSpec::new(SamplerKind::SwendsenWang, 500, 10_000, derive_seed(42, i as u64));
            let mut acc = CovAccumulator::new(1);
            run_chain(&model, &[theta], &spec, |u| acc.push(u).expect("dimension matches"))?;
            Ok(acc)
        })
        .collect::<mrf_crb::Result<Vec<_>>>()?;

    for (i, acc) in parts.iter().enumerate() {
        println!("chain {i}: FIM = {:.3}", acc.covariance()?[0]);
    }
    let merged = parts[1..]
        .iter()
        .try_fold(parts[0].clone(), |a, b| a.merge(b))?;
    println!("merged over {} samples: FIM = {:.3}", merged.count(), merged.covariance()?[0]);
    Ok(())
}
