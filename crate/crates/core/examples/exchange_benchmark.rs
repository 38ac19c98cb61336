//! Compares the spread of the exchange-algorithm ML estimator with the CRB
//! on a 16x16 Ising field.

use mrf_crb::estimators::{replicate_benchmark, Bandwidth, BenchmarkConfig, ExchangeConfig, ExchangeMl};
use mrf_crb::prelude::*;

fn main() -> mrf_crb::Result<()> {
    let model = PottsModel::lattice(16, 16, Boundary::Free, 2)?;
    let estimator = ExchangeMl {
        exchange: ExchangeConfig::with_range(0.0, model.critical_theta()),
        bandwidth: Bandwidth::Auto,
    };
    let config = BenchmarkConfig {
        n_ml: 30,
        ..BenchmarkConfig::default()
    };
    for theta in [0.2, 0.4] {
        let b = replicate_benchmark(&model, theta, &config, &estimator, 7)?;
        println!(
            "theta={theta}: var={:.3e} bias={:+.4} CRB={:.3e} var/CRB={:.2}",
            b.empirical_variance,
            b.empirical_bias,
            b.crb_at_theta,
            b.empirical_variance / b.crb_at_theta
        );
    }
    Ok(())
}
