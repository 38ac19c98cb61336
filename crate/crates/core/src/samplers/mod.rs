//! Markov chain kernels targeting `f(z) ∝ exp(θᵀΦ(z))`.
//!
//! * single-site Gibbs sampling, systematic raster scan or random scan;
//! * Swendsen-Wang cluster updates for Ising/Potts fields.
//!
//! [`run_chain`] drives either kernel and records `Φ(z)` once per sweep.

mod chain;
mod dump;
mod gibbs;
mod swendsen_wang;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use chain::{run_chain, ChainOutput, ChainSpec, InitialState};
pub use dump::{read_chain_dump, write_chain_dump, ChainDump};
pub use gibbs::{gibbs_sweep, random_scan_sweep, GibbsKernel};
pub use swendsen_wang::{swendsen_wang_step, SwendsenWang};

/// Generator behind every chain. Recorded in output metadata.
pub type ChainRng = ChaCha8Rng;

pub const RNG_ID: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub fn chain_rng(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; derives well-separated child seeds from a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    GibbsSystematic,
    GibbsRandomScan,
    SwendsenWang,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::GibbsSystematic => "gibbs",
            SamplerKind::GibbsRandomScan => "gibbs_random",
            SamplerKind::SwendsenWang => "sw",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "gibbs" | "gibbs_systematic" => Ok(SamplerKind::GibbsSystematic),
            "gibbs_random" | "random" | "gibbs_random_scan" => Ok(SamplerKind::GibbsRandomScan),
            "sw" | "swendsen_wang" | "swendsen-wang" => Ok(SamplerKind::SwendsenWang),
            other => Err(Error::Parse(format!("unknown sampler `{other}`"))),
        }
    }
}
