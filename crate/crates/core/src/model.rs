//! Exponential-family Markov random fields `f(z) ∝ exp(θᵀΦ(z))` over a
//! finite label set, and the Ising/Potts instance whose statistic counts
//! agreeing neighbor pairs.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, NeighborhoodGraph};

/// Sufficient-statistic value `Φ(z)`, length `stat_dim`.
pub type StatVector = Vec<f64>;

/// One field state. Labels are stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    labels: Vec<u16>,
}

impl Configuration {
    pub fn new(labels: Vec<u16>) -> Self {
        Self { labels }
    }

    pub fn constant(num_sites: usize, label: u16) -> Self {
        Self {
            labels: vec![label; num_sites],
        }
    }

    /// I.i.d. uniform labels ("hot start").
    pub fn random<R: Rng + ?Sized>(num_sites: usize, num_labels: usize, rng: &mut R) -> Self {
        let labels = (0..num_sites)
            .map(|_| rng.random_range(0..num_labels) as u16)
            .collect();
        Self { labels }
    }

    /// Decodes a mixed-radix state index (site 0 is the least significant digit).
    pub fn from_state_index(mut index: u64, num_sites: usize, num_labels: usize) -> Self {
        let k = num_labels as u64;
        let labels = (0..num_sites)
            .map(|_| {
                let digit = (index % k) as u16;
                index /= k;
                digit
            })
            .collect();
        Self { labels }
    }

    /// Inverse of [`Configuration::from_state_index`].
    pub fn state_index(&self, num_labels: usize) -> u64 {
        self.labels
            .iter()
            .rev()
            .fold(0u64, |acc, &l| acc * num_labels as u64 + l as u64)
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u16] {
        &mut self.labels
    }

    pub fn label(&self, site: usize) -> usize {
        self.labels[site] as usize
    }

    pub fn set_label(&mut self, site: usize, label: usize) {
        self.labels[site] = label as u16;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Generic Gibbs-form model over a lattice with `num_labels` states per site.
///
/// Implementors supply the statistic and its single-site change; the
/// provided methods derive densities and full conditionals from those two.
pub trait ExponentialFamily: Send + Sync {
    fn graph(&self) -> &NeighborhoodGraph;

    fn num_labels(&self) -> usize;

    fn stat_dim(&self) -> usize;

    /// Writes `Φ(labels)` into `out` (length `stat_dim`). Labels are assumed valid.
    fn stat_into(&self, labels: &[u16], out: &mut [f64]);

    /// Writes, for every candidate label `k`, `Φ(z with site = k) − Φ(z)`
    /// into `out` in row-major `num_labels x stat_dim` layout.
    fn relabel_deltas_into(&self, labels: &[u16], site: usize, out: &mut [f64]);

    /// Short human-readable identifier used in output metadata.
    fn describe(&self) -> String;

    fn num_sites(&self) -> usize {
        self.graph().num_sites()
    }

    /// Downcast used by kernels that exist only for the Potts family.
    fn as_potts(&self) -> Option<&PottsModel> {
        None
    }

    fn validate(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: self.num_sites(),
                got: config.len(),
            });
        }
        let k = self.num_labels();
        match config.labels().iter().position(|&l| l as usize >= k) {
            Some(site) => Err(Error::LabelOutOfRange {
                site,
                label: config.label(site),
                num_labels: k,
            }),
            None => Ok(()),
        }
    }

    fn validate_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.stat_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.stat_dim(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(format!("theta must be finite, got {theta:?}")));
        }
        Ok(())
    }

    fn sufficient_statistic(&self, config: &Configuration) -> Result<StatVector> {
        self.validate(config)?;
        let mut out = vec![0.0; self.stat_dim()];
        self.stat_into(config.labels(), &mut out);
        Ok(out)
    }

    fn statistic_delta(
        &self,
        config: &Configuration,
        site: usize,
        new_label: usize,
    ) -> Result<StatVector> {
        self.validate(config)?;
        if site >= self.num_sites() {
            return Err(Error::SiteOutOfRange {
                site,
                num_sites: self.num_sites(),
            });
        }
        if new_label >= self.num_labels() {
            return Err(Error::LabelOutOfRange {
                site,
                label: new_label,
                num_labels: self.num_labels(),
            });
        }
        let m = self.stat_dim();
        let mut all = vec![0.0; self.num_labels() * m];
        self.relabel_deltas_into(config.labels(), site, &mut all);
        Ok(all[new_label * m..(new_label + 1) * m].to_vec())
    }

    /// `θᵀΦ(z)`; the log partition function is not included.
    fn log_unnormalized_density(&self, theta: &[f64], config: &Configuration) -> Result<f64> {
        self.validate_theta(theta)?;
        let stat = self.sufficient_statistic(config)?;
        Ok(dot(theta, &stat))
    }

    /// Full conditional of `site` given all other labels.
    fn conditional_distribution(
        &self,
        theta: &[f64],
        config: &Configuration,
        site: usize,
    ) -> Result<Vec<f64>> {
        self.validate_theta(theta)?;
        self.validate(config)?;
        if site >= self.num_sites() {
            return Err(Error::SiteOutOfRange {
                site,
                num_sites: self.num_sites(),
            });
        }
        let mut scratch = vec![0.0; self.num_labels() * self.stat_dim()];
        let mut probs = vec![0.0; self.num_labels()];
        self.conditional_into(theta, config.labels(), site, &mut scratch, &mut probs);
        Ok(probs)
    }

    /// Unchecked form of [`ExponentialFamily::conditional_distribution`] for
    /// sampler inner loops. `scratch` must hold `num_labels * stat_dim` values.
    fn conditional_into(
        &self,
        theta: &[f64],
        labels: &[u16],
        site: usize,
        scratch: &mut [f64],
        probs: &mut [f64],
    ) {
        let m = self.stat_dim();
        self.relabel_deltas_into(labels, site, scratch);
        let mut max = f64::NEG_INFINITY;
        for (k, p) in probs.iter_mut().enumerate() {
            *p = dot(theta, &scratch[k * m..(k + 1) * m]);
            max = max.max(*p);
        }
        let mut total = 0.0;
        for p in probs.iter_mut() {
            *p = (*p - max).exp();
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Homogeneous Ising (`K = 2`) or Potts (`K >= 3`) field.
///
/// `Φ(z)` is the number of unordered neighbor pairs with equal labels, so
/// each edge contributes at most once and the critical point of the square
/// lattice sits at `θ = ln(1 + √K)`.
#[derive(Debug, Clone)]
pub struct PottsModel {
    graph: NeighborhoodGraph,
    num_labels: usize,
}

impl PottsModel {
    pub fn new(graph: NeighborhoodGraph, num_labels: usize) -> Result<Self> {
        if num_labels < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 labels, got {num_labels}"
            )));
        }
        if num_labels > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("too many labels: {num_labels}")));
        }
        Ok(Self { graph, num_labels })
    }

    pub fn lattice(
        width: usize,
        height: usize,
        boundary: Boundary,
        num_labels: usize,
    ) -> Result<Self> {
        Self::new(NeighborhoodGraph::lattice(width, height, boundary)?, num_labels)
    }

    pub fn is_ising(&self) -> bool {
        self.num_labels == 2
    }

    /// `ln(1 + √K)`.
    pub fn critical_theta(&self) -> f64 {
        critical_theta(self.num_labels)
    }

    /// Number of agreeing edges, as an integer.
    pub fn agreement_count(&self, labels: &[u16]) -> usize {
        self.graph
            .edges()
            .iter()
            .filter(|&&(a, b)| labels[a] == labels[b])
            .count()
    }
}

pub fn critical_theta(num_labels: usize) -> f64 {
    (1.0 + (num_labels as f64).sqrt()).ln()
}

impl ExponentialFamily for PottsModel {
    fn graph(&self) -> &NeighborhoodGraph {
        &self.graph
    }

    fn num_labels(&self) -> usize {
        self.num_labels
    }

    fn stat_dim(&self) -> usize {
        1
    }

    fn stat_into(&self, labels: &[u16], out: &mut [f64]) {
        out[0] = self.agreement_count(labels) as f64;
    }

    fn relabel_deltas_into(&self, labels: &[u16], site: usize, out: &mut [f64]) {
        out.fill(0.0);
        for &nb in self.graph.neighbors(site) {
            out[labels[nb] as usize] += 1.0;
        }
        let current = out[labels[site] as usize];
        for d in out.iter_mut() {
            *d -= current;
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }

    fn as_potts(&self) -> Option<&PottsModel> {
        Some(self)
    }
}

impl fmt::Display for PottsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = if self.is_ising() { "ising" } else { "potts" };
        write!(f, "{family} K={} {}", self.num_labels, self.graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn free(w: usize, h: usize, k: usize) -> PottsModel {
        PottsModel::lattice(w, h, Boundary::Free, k).unwrap()
    }

    fn torus(w: usize, h: usize, k: usize) -> PottsModel {
        PottsModel::lattice(w, h, Boundary::Toroidal, k).unwrap()
    }

    #[test]
    fn statistic_examples() {
        let m = free(2, 2, 2);
        assert_eq!(m.sufficient_statistic(&Configuration::constant(4, 1)).unwrap(), vec![4.0]);
        let checker = Configuration::new(vec![0, 1, 1, 0]);
        assert_eq!(m.sufficient_statistic(&checker).unwrap(), vec![0.0]);
        let t = torus(3, 3, 2);
        assert_eq!(t.sufficient_statistic(&Configuration::constant(9, 0)).unwrap(), vec![18.0]);
    }

    #[test]
    fn statistic_rejects_bad_labels() {
        let m = free(2, 2, 2);
        let err = m.sufficient_statistic(&Configuration::new(vec![0, 2, 0, 0])).unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { site: 1, label: 2, .. }));
        assert!(m.sufficient_statistic(&Configuration::new(vec![0, 0])).is_err());
    }

    #[test]
    fn delta_examples() {
        let t = torus(3, 3, 2);
        let z = Configuration::constant(9, 0);
        assert_eq!(t.statistic_delta(&z, 4, 0).unwrap(), vec![0.0]);
        assert_eq!(t.statistic_delta(&z, 4, 1).unwrap(), vec![-4.0]);
        assert!(t.statistic_delta(&z, 9, 0).is_err());
        assert!(t.statistic_delta(&z, 0, 2).is_err());
    }

    #[test]
    fn conditional_examples() {
        let t = torus(3, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = Configuration::random(9, 3, &mut rng);
        let p = t.conditional_distribution(&[0.0], &z, 2).unwrap();
        for pk in &p {
            assert!((pk - 1.0 / 3.0).abs() < 1e-15);
        }

        // Center of a 3x3 free lattice has 4 neighbors, all label 0.
        let m = free(3, 3, 2);
        let mut z = Configuration::constant(9, 0);
        z.set_label(4, 1);
        for theta in [0.3, -0.7, 2.0] {
            let p = m.conditional_distribution(&[theta], &z, 4).unwrap();
            let e = (4.0 * theta).exp();
            assert!((p[0] - e / (e + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn conditional_matches_density_ratio() {
        let m = free(2, 2, 3);
        let theta = [0.8];
        for index in 0..81 {
            let z = Configuration::from_state_index(index, 4, 3);
            for site in 0..4 {
                let p = m.conditional_distribution(&theta, &z, site).unwrap();
                let weights: Vec<f64> = (0..3)
                    .map(|k| {
                        let mut w = z.clone();
                        w.set_label(site, k);
                        m.log_unnormalized_density(&theta, &w).unwrap().exp()
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                for k in 0..3 {
                    assert!((p[k] - weights[k] / total).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn log_density_examples() {
        let t = torus(3, 3, 2);
        let z = Configuration::constant(9, 1);
        assert_eq!(t.log_unnormalized_density(&[0.0], &z).unwrap(), 0.0);
        assert_eq!(t.log_unnormalized_density(&[0.5], &z).unwrap(), 9.0);
        assert!(t.log_unnormalized_density(&[f64::NAN], &z).is_err());
        assert!(t.log_unnormalized_density(&[0.1, 0.2], &z).is_err());
    }

    #[test]
    fn state_index_round_trip() {
        for index in 0..243 {
            let z = Configuration::from_state_index(index, 5, 3);
            assert_eq!(z.state_index(3), index);
        }
    }

    #[test]
    fn critical_values() {
        assert!((critical_theta(2) - 0.881373587).abs() < 1e-8);
        assert!((free(2, 2, 3).critical_theta() - (1.0 + 3f64.sqrt()).ln()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn delta_equals_recompute(seed in any::<u64>(), site in 0usize..16, label in 0usize..3, toroidal in any::<bool>()) {
            let boundary = if toroidal { Boundary::Toroidal } else { Boundary::Free };
            let m = PottsModel::lattice(4, 4, boundary, 3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = Configuration::random(16, 3, &mut rng);
            let before = m.sufficient_statistic(&z).unwrap()[0];
            let delta = m.statistic_delta(&z, site, label).unwrap()[0];
            let mut after = z.clone();
            after.set_label(site, label);
            prop_assert_eq!(m.sufficient_statistic(&after).unwrap()[0] - before, delta);
        }

        #[test]
        fn permutation_invariance(seed in any::<u64>(), shift in 1u16..4) {
            let m = torus(4, 3, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = Configuration::random(12, 4, &mut rng);
            let permuted = Configuration::new(z.labels().iter().map(|l| (l + shift) % 4).collect());
            prop_assert_eq!(m.sufficient_statistic(&z).unwrap(), m.sufficient_statistic(&permuted).unwrap());
        }

        #[test]
        fn statistic_range(seed in any::<u64>(), w in 1usize..6, h in 1usize..6) {
            let m = free(w, h, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = Configuration::random(w * h, 2, &mut rng);
            let phi = m.sufficient_statistic(&z).unwrap()[0];
            prop_assert!(phi >= 0.0 && phi <= m.graph().num_edges() as f64);
        }

        #[test]
        fn conditional_normalized(seed in any::<u64>(), theta in -10.0f64..10.0, site in 0usize..9) {
            let m = torus(3, 3, 5);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = Configuration::random(9, 5, &mut rng);
            let p = m.conditional_distribution(&[theta], &z, site).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn range_bounds_attained() {
        let m = free(4, 3, 2);
        let all = Configuration::constant(12, 0);
        assert_eq!(m.sufficient_statistic(&all).unwrap()[0], m.graph().num_edges() as f64);
        let coloring =
            Configuration::new((0..12).map(|s| ((s % 4 + s / 4) % 2) as u16).collect());
        assert_eq!(m.sufficient_statistic(&coloring).unwrap()[0], 0.0);
    }
}
