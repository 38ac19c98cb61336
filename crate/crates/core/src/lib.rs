//! Monte Carlo Fisher information and Cramér-Rao bounds for Markov random
//! fields with intractable partition functions.
//!
//! For an exponential-family field `f_θ(z) = exp(θᵀΦ(z)) / C(θ)` the Fisher
//! information is `cov_θ[Φ(z)]`, an expectation that a Markov chain can
//! estimate without ever touching `C(θ)`. The crate provides
//!
//! * [`lattice`] and [`model`]: 4-neighbor lattices and the Ising/Potts model;
//! * [`samplers`]: Gibbs and Swendsen-Wang chains recording `Φ` per sweep;
//! * [`fim`]: streaming covariance, effective sample size and the CRB;
//! * [`oracle`]: exact moments by enumeration for small lattices;
//! * [`estimators`]: an exchange-algorithm ML estimator and its benchmark;
//! * [`experiments`]: the parameter sweeps behind the `mrf-crb` binary.
//!
//! ```
//! use mrf_crb::prelude::*;
//!
//! let model = PottsModel::lattice(3, 3, Boundary::Toroidal, 2).unwrap();
//! let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 100, 20_000, 7);
//! let (fim, _) = monte_carlo_fim(&model, &[0.4], &spec).unwrap();
//! let exact = exact_crb(&model, &[0.4]).unwrap();
//! let mc = crb_from_fim(&fim).unwrap();
//! assert!((mc.crb[(0, 0)] / exact.crb[(0, 0)] - 1.0).abs() < 0.1);
//! ```

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod fim;
pub mod field_io;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod samplers;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::fim::{crb_from_fim, monte_carlo_fim, CovAccumulator, CrbReport, FimEstimate};
    pub use crate::lattice::{Boundary, NeighborhoodGraph};
    pub use crate::model::{critical_theta, Configuration, ExponentialFamily, PottsModel};
    pub use crate::oracle::{enumerate_moments, exact_crb};
    pub use crate::samplers::{run_chain, ChainSpec, InitialState, SamplerKind};
}
