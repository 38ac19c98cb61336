//! Monte Carlo CRB over a θ grid on a 3x3 torus, next to the exact value,
//! written as CSV to standard output.

use mrf_crb::experiments::{run_experiment, ExperimentConfig, LatticeSize, Mode};

fn main() -> mrf_crb::Result<()> {
    let mut config = ExperimentConfig::new(Mode::Sweep);
    config.size = LatticeSize { width: 3, height: 3 };
    config.thetas = (1..=15).map(|i| i as f64 / 10.0).collect();
    config.n_mc = 50_000;
    let output = run_experiment(&config, &|line| eprintln!("{line}"))?;
    output.write_csv(&config, std::io::stdout().lock())?;

    let worst = output
        .rows
        .iter()
        .filter_map(|r| r.rel_err)
        .fold(0.0, f64::max);
    eprintln!("largest relative error against enumeration: {:.2}%", 100.0 * worst);
    Ok(())
}
