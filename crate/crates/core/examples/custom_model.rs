//! A two-parameter model, an Ising field with separate horizontal and vertical
//! couplings, plugged into the generic Gibbs sampler, FIM estimator and
//! enumeration oracle.

use mrf_crb::lattice::NeighborhoodGraph;
use mrf_crb::oracle::exact_crb;
use mrf_crb::prelude::*;

struct Anisotropic {
    graph: NeighborhoodGraph,
    width: usize,
}

impl Anisotropic {
    fn direction(&self, a: usize, b: usize) -> usize {
        if a / self.width == b / self.width { 0 } else { 1 }
    }
}

impl ExponentialFamily for Anisotropic {
    fn graph(&self) -> &NeighborhoodGraph {
        &self.graph
    }

    fn num_labels(&self) -> usize {
        2
    }

    fn stat_dim(&self) -> usize {
        2
    }

    fn stat_into(&self, labels: &[u16], out: &mut [f64]) {
        out.fill(0.0);
        for &(a, b) in self.graph.edges() {
            if labels[a] == labels[b] {
                out[self.direction(a, b)] += 1.0;
            }
        }
    }

    fn relabel_deltas_into(&self, labels: &[u16], site: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &nb in self.graph.neighbors(site) {
            let d = self.direction(site, nb);
            let now = (labels[site] == labels[nb]) as i32;
            for k in 0..2u16 {
                out[k as usize * 2 + d] += ((k == labels[nb]) as i32 - now) as f64;
            }
        }
    }

    fn describe(&self) -> String {
        format!("anisotropic ising {}", self.graph)
    }
}

fn main() -> mrf_crb::Result<()> {
    let (w, h) = (4, 4);
    let model = Anisotropic {
        graph: NeighborhoodGraph::lattice(w, h, Boundary::Toroidal)?,
        width: w,
    };
    let theta = [0.2, 0.8];
    let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 1000, 100_000, 3);
    let (fim, _) = monte_carlo_fim(&model, &theta, &spec)?;
    let mc = crb_from_fim(&fim)?;
    let exact = exact_crb(&model, &theta)?;
    println!("Monte Carlo CRB:\n{:.5}", mc.crb);
    println!("exact CRB:\n{:.5}", exact.crb);
    println!("condition number {:.2}", mc.condition_number);
    Ok(())
}
