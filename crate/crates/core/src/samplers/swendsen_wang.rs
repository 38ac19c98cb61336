use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Configuration, ExponentialFamily, PottsModel};

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.fill(1);
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Reusable Swendsen-Wang kernel for one Potts model and `θ >= 0`.
///
/// Bonds open on agreeing edges with probability `1 − e^{−θ}`; every
/// connected cluster of open bonds then receives a fresh uniform label.
pub struct SwendsenWang<'a> {
    model: &'a PottsModel,
    bond_prob: f64,
    forest: UnionFind,
    cluster_label: Vec<u16>,
}

const UNASSIGNED: u16 = u16::MAX;

impl<'a> SwendsenWang<'a> {
    pub fn new(model: &'a PottsModel, theta: f64) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Swendsen-Wang needs a finite theta >= 0, got {theta}"
            )));
        }
        let n = model.num_sites();
        Ok(Self {
            model,
            bond_prob: -(-theta).exp_m1(),
            forest: UnionFind::new(n),
            cluster_label: vec![UNASSIGNED; n],
        })
    }

    pub fn bond_probability(&self) -> f64 {
        self.bond_prob
    }

    /// Performs one update; returns the number of clusters.
    pub fn step<R: Rng + ?Sized>(&mut self, labels: &mut [u16], rng: &mut R) -> usize {
        self.forest.reset();
        if self.bond_prob > 0.0 {
            for &(a, b) in self.model.graph().edges() {
                if labels[a] == labels[b] && rng.random::<f64>() < self.bond_prob {
                    self.forest.union(a as u32, b as u32);
                }
            }
        }
        let k = self.model.num_labels();
        self.cluster_label.fill(UNASSIGNED);
        let mut clusters = 0;
        for site in 0..labels.len() {
            let root = self.forest.find(site as u32) as usize;
            if self.cluster_label[root] == UNASSIGNED {
                self.cluster_label[root] = rng.random_range(0..k) as u16;
                clusters += 1;
            }
            labels[site] = self.cluster_label[root];
        }
        clusters
    }
}

/// Applies one Swendsen-Wang update to `config` in place.
pub fn swendsen_wang_step<R: Rng + ?Sized>(
    model: &PottsModel,
    theta: f64,
    config: &mut Configuration,
    rng: &mut R,
) -> Result<()> {
    model.validate(config)?;
    SwendsenWang::new(model, theta)?.step(config.labels_mut(), rng);
    Ok(())
}
