//! Writes a sampled field in the text format accepted by `--init`, reads it
//! back and uses it to start a chain.

use mrf_crb::estimators::simulate_field;
use mrf_crb::field_io::{read_configuration, write_configuration};
use mrf_crb::prelude::*;

fn main() -> mrf_crb::Result<()> {
    let model = PottsModel::lattice(8, 6, Boundary::Free, 3)?;
    let z = simulate_field(&model, 1.2, 200, 3)?;

    let mut text = Vec::new();
    write_configuration(&model, &z, &mut text)?;
    print!("{}", String::from_utf8_lossy(&text));

    let (back_model, back) = read_configuration(text.as_slice())?;
    assert_eq!(back, z);
    println!("read back {back_model}, Φ = {}", back_model.sufficient_statistic(&back)?[0]);

    let spec = ChainSpec::new(SamplerKind::SwendsenWang, 0, 1000, 4).with_init(InitialState::Given(back));
    let (fim, _) = monte_carlo_fim(&model, &[1.2], &spec)?;
    println!("FIM from a warm start: {:.3}", fim.matrix[(0, 0)]);
    Ok(())
}
