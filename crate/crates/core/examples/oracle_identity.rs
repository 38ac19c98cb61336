//! Exact moments by enumeration, and finite-difference checks that the
//! derivatives of `log C(θ)` are the mean and variance of `Φ`.

use mrf_crb::oracle::{hessian_residual, identity_residual, DensityOfStates, DEFAULT_ENUMERATION_CAP};
use mrf_crb::prelude::*;

fn main() -> mrf_crb::Result<()> {
    let model = PottsModel::lattice(3, 3, Boundary::Toroidal, 3)?;
    let dos = DensityOfStates::enumerate(&model, DEFAULT_ENUMERATION_CAP)?;
    println!("{model}: {} states in {} levels of Φ", dos.num_states(), dos.levels().len());
    println!("{:>6} {:>10} {:>10} {:>10} {:>11} {:>11}", "theta", "log C", "E[Φ]", "var[Φ]", "d1 resid", "d2 resid");
    for theta in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let m = dos.moments(&[theta])?;
        let d1 = identity_residual(&dos, &[theta], 1e-4)?[0];
        let d2 = hessian_residual(&dos, &[theta], 1e-3)?[(0, 0)];
        println!(
            "{theta:>6.2} {:>10.4} {:>10.4} {:>10.4} {d1:>11.2e} {d2:>11.2e}",
            m.log_partition, m.mean_stat[0], m.cov_stat[(0, 0)]
        );
    }

    let exact = exact_crb(&model, &[1.0])?;
    println!("exact CRB at theta = 1: {:.6}", exact.crb[(0, 0)]);
    Ok(())
}
