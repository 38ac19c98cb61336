//! Monte Carlo CRB of a 32x32 toroidal Ising field at a single θ.
//!
//! ```bash
//! cargo run --example estimate_crb -- 0.6
//! ```

use mrf_crb::prelude::*;

fn main() -> mrf_crb::Result<()> {
    let theta: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("theta must be a number"))
        .unwrap_or(0.5);
    let model = PottsModel::lattice(32, 32, Boundary::Toroidal, 2)?;
    let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 1000, 50_000, 1);

    let (fim, _chain) = monte_carlo_fim(&model, &[theta], &spec)?;
    let report = crb_from_fim(&fim)?;

    println!("{model}, theta = {theta}");
    println!("  FIM  = {:.4} ± {:.4}", fim.matrix[(0, 0)], fim.se_matrix[(0, 0)]);
    println!("  ESS  = {:.0} of {}", fim.ess_per_component[0], fim.n_mc);
    println!("  CRB  = {:.4e}", report.crb[(0, 0)]);
    println!("  std. dev. floor for unbiased estimators = {:.4}", report.crb[(0, 0)].sqrt());
    Ok(())
}
