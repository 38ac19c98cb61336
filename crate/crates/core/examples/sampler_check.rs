//! Histogram of states visited by each kernel on a 2x2 Potts field, against
//! the exact probabilities.

use mrf_crb::model::Configuration;
use mrf_crb::oracle::{state_probabilities, DEFAULT_ENUMERATION_CAP};
use mrf_crb::prelude::*;
use mrf_crb::samplers::{chain_rng, gibbs_sweep, random_scan_sweep, swendsen_wang_step};

fn main() -> mrf_crb::Result<()> {
    let model = PottsModel::lattice(2, 2, Boundary::Free, 2)?;
    let theta = 0.8;
    let exact = state_probabilities(&model, &[theta], DEFAULT_ENUMERATION_CAP)?;
    let draws = 200_000;

    for kind in [SamplerKind::GibbsSystematic, SamplerKind::GibbsRandomScan, SamplerKind::SwendsenWang] {
        let mut rng = chain_rng(1);
        let mut z = Configuration::random(4, 2, &mut rng);
        let mut counts = vec![0usize; exact.len()];
        for _ in 0..draws {
            match kind {
                SamplerKind::GibbsSystematic => gibbs_sweep(&model, &[theta], &mut z, &mut rng)?,
                SamplerKind::GibbsRandomScan => random_scan_sweep(&model, &[theta], &mut z, &mut rng)?,
                SamplerKind::SwendsenWang => swendsen_wang_step(&model, theta, &mut z, &mut rng)?,
            }
            counts[z.state_index(2) as usize] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&exact)
            .map(|(&c, p)| (c as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        println!("{kind:>12}: total variation distance to f_theta = {tv:.4}");
    }
    Ok(())
}
