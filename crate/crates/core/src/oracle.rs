//! Exact ground truth for small lattices by exhaustive enumeration.
//!
//! All `K^N` configurations are visited once with a mixed-radix counter
//! (site 0 is the fastest digit) while `Φ` is updated incrementally. The
//! visit produces a density of states, the multiplicity of every distinct
//! value of `Φ`; partition function, moments and their derivatives at any
//! `θ` then cost one pass over the (few) distinct levels.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fim::{crb_from_fim, CrbReport, FimEstimate};
use crate::model::{dot, ExponentialFamily, StatVector};

/// Largest state space enumerated by default (`2²⁴`).
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments {
    pub log_partition: f64,
    pub mean_stat: DVector<f64>,
    pub cov_stat: DMatrix<f64>,
}

/// Number of configurations of `model`, or an error past `cap`.
pub fn state_count<M: ExponentialFamily + ?Sized>(model: &M, cap: u64) -> Result<u64> {
    let states = (model.num_labels() as f64).powi(model.num_sites() as i32);
    if states > cap as f64 {
        return Err(Error::Intractable { states, cap });
    }
    Ok((model.num_labels() as u64).pow(model.num_sites() as u32))
}

/// Visits every configuration in state-index order, passing labels and `Φ`.
pub fn for_each_state<M, F>(model: &M, cap: u64, mut visit: F) -> Result<()>
where
    M: ExponentialFamily + ?Sized,
    F: FnMut(&[u16], &[f64]),
{
    state_count(model, cap)?;
    let n = model.num_sites();
    let k = model.num_labels();
    let m = model.stat_dim();
    let mut labels = vec![0u16; n];
    let mut stat = vec![0.0; m];
    model.stat_into(&labels, &mut stat);
    let mut deltas = vec![0.0; k * m];

    let mut apply = |labels: &mut [u16], stat: &mut [f64], site: usize, to: usize| {
        model.relabel_deltas_into(labels, site, &mut deltas);
        for (s, d) in stat.iter_mut().zip(&deltas[to * m..(to + 1) * m]) {
            *s += d;
        }
        labels[site] = to as u16;
    };

    loop {
        visit(&labels, &stat);
        let mut site = 0;
        loop {
            if site == n {
                return Ok(());
            }
            let next = labels[site] as usize + 1;
            if next < k {
                apply(&mut labels, &mut stat, site, next);
                break;
            }
            apply(&mut labels, &mut stat, site, 0);
            site += 1;
        }
    }
}

/// Multiplicity of every distinct statistic value.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOfStates {
    stat_dim: usize,
    num_states: u64,
    /// `(Φ level, number of configurations)`, sorted by level.
    levels: Vec<(StatVector, f64)>,
}

impl DensityOfStates {
    pub fn enumerate<M: ExponentialFamily + ?Sized>(model: &M, cap: u64) -> Result<Self> {
        let m = model.stat_dim();
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
        let mut key = vec![0u64; m];
        let mut num_states = 0u64;
        for_each_state(model, cap, |_, stat| {
            num_states += 1;
            for (k, s) in key.iter_mut().zip(stat) {
                // Normalize -0.0 so equal levels share one key.
                *k = (s + 0.0).to_bits();
            }
            match counts.get_mut(key.as_slice()) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(key.clone(), 1);
                }
            }
        })?;
        let mut levels: Vec<(StatVector, f64)> = counts
            .into_iter()
            .map(|(bits, c)| (bits.into_iter().map(f64::from_bits).collect(), c as f64))
            .collect();
        levels.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(Self {
            stat_dim: m,
            num_states,
            levels,
        })
    }

    pub fn num_states(&self) -> u64 {
        self.num_states
    }

    pub fn levels(&self) -> &[(StatVector, f64)] {
        &self.levels
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.stat_dim {
            return Err(Error::DimensionMismatch {
                expected: self.stat_dim,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// `log C(θ)` via log-sum-exp over levels.
    pub fn log_partition(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let exps: Vec<f64> = self
            .levels
            .iter()
            .map(|(phi, c)| c.ln() + dot(theta, phi))
            .collect();
        let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(max + exps.iter().map(|a| (a - max).exp()).sum::<f64>().ln())
    }

    /// Probability mass of every level at `θ`.
    pub fn level_probabilities(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let log_c = self.log_partition(theta)?;
        Ok(self
            .levels
            .iter()
            .map(|(phi, c)| (c.ln() + dot(theta, phi) - log_c).exp())
            .collect())
    }

    pub fn moments(&self, theta: &[f64]) -> Result<ExactMoments> {
        let log_partition = self.log_partition(theta)?;
        let probs = self.level_probabilities(theta)?;
        let m = self.stat_dim;
        let mut mean = DVector::zeros(m);
        for ((phi, _), p) in self.levels.iter().zip(&probs) {
            for i in 0..m {
                mean[i] += p * phi[i];
            }
        }
        let mut cov = DMatrix::zeros(m, m);
        for ((phi, _), p) in self.levels.iter().zip(&probs) {
            for i in 0..m {
                for j in 0..m {
                    cov[(i, j)] += p * (phi[i] - mean[i]) * (phi[j] - mean[j]);
                }
            }
        }
        Ok(ExactMoments {
            log_partition,
            mean_stat: mean,
            cov_stat: cov,
        })
    }

    /// `log C(θ + step) − log C(θ)`, evaluated as `log E_θ[exp(stepᵀΦ)]`
    /// through `ln_1p`/`exp_m1` so that small steps keep full precision.
    pub fn log_partition_increment(&self, theta: &[f64], step: &[f64]) -> Result<f64> {
        self.check_theta(step)?;
        let probs = self.level_probabilities(theta)?;
        let s: f64 = self
            .levels
            .iter()
            .zip(&probs)
            .map(|((phi, _), p)| p * dot(step, phi).exp_m1())
            .sum();
        Ok(s.ln_1p())
    }
}

/// Exact `log C`, `E[Φ]` and `cov[Φ]` at `θ`.
pub fn enumerate_moments<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: &[f64],
) -> Result<ExactMoments> {
    model.validate_theta(theta)?;
    DensityOfStates::enumerate(model, DEFAULT_ENUMERATION_CAP)?.moments(theta)
}

/// Wraps exact moments as a Fisher information "estimate" with zero
/// standard error and infinite effective sample size.
pub fn exact_fim(moments: &ExactMoments, theta: &[f64], descriptor: &str) -> FimEstimate {
    let d = moments.cov_stat.nrows();
    FimEstimate {
        matrix: moments.cov_stat.clone(),
        n_mc: 0,
        ess_per_component: vec![f64::INFINITY; d],
        se_matrix: DMatrix::zeros(d, d),
        theta: theta.to_vec(),
        model_descriptor: format!("{descriptor} (exact)"),
        degenerate: (0..d).any(|i| moments.cov_stat[(i, i)] == 0.0),
    }
}

pub fn exact_crb<M: ExponentialFamily + ?Sized>(model: &M, theta: &[f64]) -> Result<CrbReport> {
    let moments = enumerate_moments(model, theta)?;
    crb_from_fim(&exact_fim(&moments, theta, &model.describe()))
}

fn unit(m: usize, i: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = scale;
    v
}

/// Central-difference `∂ log C / ∂θ_i` minus `E[Φ_i]`, per component.
pub fn check_identity<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    model.validate_theta(theta)?;
    let dos = DensityOfStates::enumerate(model, DEFAULT_ENUMERATION_CAP)?;
    identity_residual(&dos, theta, h)
}

pub fn identity_residual(dos: &DensityOfStates, theta: &[f64], h: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    let moments = dos.moments(theta)?;
    let m = theta.len();
    (0..m)
        .map(|i| {
            let up = dos.log_partition_increment(theta, &unit(m, i, h))?;
            let down = dos.log_partition_increment(theta, &unit(m, i, -h))?;
            Ok((up - down) / (2.0 * h) - moments.mean_stat[i])
        })
        .collect()
}

/// Central second differences of `log C` minus `cov[Φ]`. The diagonal uses
/// the five-point stencil (error `O(h⁴)`); the three-point one leaves
/// `h² κ₄ / 12`, which near the transition on a 3×3 torus exceeds 1e-5 at
/// `h = 1e-3`.
pub fn check_second_derivative<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: &[f64],
    h: f64,
) -> Result<DMatrix<f64>> {
    model.validate_theta(theta)?;
    let dos = DensityOfStates::enumerate(model, DEFAULT_ENUMERATION_CAP)?;
    hessian_residual(&dos, theta, h)
}

pub fn hessian_residual(dos: &DensityOfStates, theta: &[f64], h: f64) -> Result<DMatrix<f64>> {
    check_step(h)?;
    let moments = dos.moments(theta)?;
    let m = theta.len();
    let inc = |step: Vec<f64>| dos.log_partition_increment(theta, &step);
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let second = if i == j {
                let f = |s: f64| inc(unit(m, i, s * h));
                (16.0 * (f(1.0)? + f(-1.0)?) - f(2.0)? - f(-2.0)?) / (12.0 * h * h)
            } else {
                let pair = |si: f64, sj: f64| {
                    let mut v = vec![0.0; m];
                    v[i] = si * h;
                    v[j] = sj * h;
                    v
                };
                (inc(pair(1.0, 1.0))? - inc(pair(1.0, -1.0))? - inc(pair(-1.0, 1.0))?
                    + inc(pair(-1.0, -1.0))?)
                    / (4.0 * h * h)
            };
            let r = second - moments.cov_stat[(i, j)];
            out[(i, j)] = r;
            out[(j, i)] = r;
        }
    }
    Ok(out)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    Ok(())
}

/// Probability of every configuration, indexed by `Configuration::state_index`.
pub fn state_probabilities<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: &[f64],
    cap: u64,
) -> Result<Vec<f64>> {
    model.validate_theta(theta)?;
    let mut log_w = Vec::with_capacity(state_count(model, cap)? as usize);
    for_each_state(model, cap, |_, stat| log_w.push(dot(theta, stat)))?;
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_w.iter().map(|a| (a - max).exp()).sum();
    Ok(log_w.iter().map(|a| (a - max).exp() / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::model::{Configuration, PottsModel};

    fn potts(w: usize, h: usize, b: Boundary, k: usize) -> PottsModel {
        PottsModel::lattice(w, h, b, k).unwrap()
    }

    #[test]
    fn enumeration_matches_full_recompute() {
        let m = potts(3, 2, Boundary::Free, 3);
        let mut index = 0u64;
        for_each_state(&m, DEFAULT_ENUMERATION_CAP, |labels, stat| {
            let z = Configuration::from_state_index(index, 6, 3);
            assert_eq!(labels, z.labels());
            assert_eq!(stat, m.sufficient_statistic(&z).unwrap().as_slice());
            index += 1;
        })
        .unwrap();
        assert_eq!(index, 729);
    }

    #[test]
    fn single_edge_closed_form() {
        let m = potts(1, 2, Boundary::Free, 2);
        for theta in [0.0, 0.3, 1.7, -0.4] {
            let e: f64 = f64::exp(theta);
            let mom = enumerate_moments(&m, &[theta]).unwrap();
            assert!((mom.log_partition - (2.0 * e + 2.0).ln()).abs() < 1e-14);
            assert!((mom.mean_stat[0] - e / (e + 1.0)).abs() < 1e-14);
            assert!((mom.cov_stat[(0, 0)] - e / ((e + 1.0) * (e + 1.0))).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_theta_is_uniform() {
        for (m, k) in [
            (potts(3, 3, Boundary::Toroidal, 2), 2.0),
            (potts(2, 3, Boundary::Free, 3), 3.0),
        ] {
            let mom = enumerate_moments(&m, &[0.0]).unwrap();
            let n = m.num_sites() as f64;
            let edges = m.graph().num_edges() as f64;
            assert!((mom.log_partition - n * f64::ln(k)).abs() < 1e-12);
            assert!((mom.mean_stat[0] - edges / k).abs() < 1e-12);
            // Pairwise edge indicators are independent under uniform labels.
            assert!((mom.cov_stat[(0, 0)] - edges * (k - 1.0) / (k * k)).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization() {
        let m = potts(3, 3, Boundary::Toroidal, 3);
        for theta in [0.0, 0.5, 1.5] {
            let p = state_probabilities(&m, &[theta], DEFAULT_ENUMERATION_CAP).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let dos = DensityOfStates::enumerate(&m, DEFAULT_ENUMERATION_CAP).unwrap();
            let lp = dos.level_probabilities(&[theta]).unwrap();
            assert!((lp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_enforced() {
        let m = potts(64, 64, Boundary::Toroidal, 2);
        assert!(matches!(
            enumerate_moments(&m, &[0.5]),
            Err(Error::Intractable { .. })
        ));
        let small = potts(3, 3, Boundary::Toroidal, 2);
        assert!(DensityOfStates::enumerate(&small, 100).is_err());
        assert_eq!(DensityOfStates::enumerate(&small, 512).unwrap().num_states(), 512);
    }

    #[test]
    fn exact_crb_examples() {
        let m = potts(1, 2, Boundary::Free, 2);
        let r = exact_crb(&m, &[0.0]).unwrap();
        assert!((r.crb[(0, 0)] - 4.0).abs() < 1e-12);

        let lone = potts(1, 1, Boundary::Free, 2);
        assert!(matches!(exact_crb(&lone, &[0.3]), Err(Error::SingularFim { .. })));
    }

    #[test]
    fn identity_examples() {
        let m = potts(1, 2, Boundary::Free, 2);
        let r = check_identity(&m, &[0.7], 1e-4).unwrap();
        assert!(r[0].abs() <= 1e-6);
        let r1 = check_identity(&m, &[0.7], 1e-2).unwrap()[0];
        let r2 = check_identity(&m, &[0.7], 5e-3).unwrap()[0];
        assert!((r1 / r2 - 4.0).abs() < 0.05, "{}", r1 / r2);
        assert!(check_identity(&m, &[0.7], 0.0).is_err());

        let p = potts(2, 3, Boundary::Free, 3);
        assert!(check_identity(&p, &[0.9], 1e-4).unwrap()[0].abs() <= 1e-6);
    }

    #[test]
    fn second_derivative_examples() {
        let m = potts(1, 2, Boundary::Free, 2);
        let r = check_second_derivative(&m, &[0.4], 1e-3).unwrap();
        assert!(r[(0, 0)].abs() < 1e-7);

        let sq = potts(2, 2, Boundary::Free, 2);
        let r = check_second_derivative(&sq, &[0.0], 1e-3).unwrap();
        assert!(r[(0, 0)].abs() < 1e-5);
    }

    #[test]
    fn increment_agrees_with_difference_of_log_partitions() {
        let m = potts(3, 3, Boundary::Toroidal, 2);
        let dos = DensityOfStates::enumerate(&m, DEFAULT_ENUMERATION_CAP).unwrap();
        let a = dos.log_partition(&[0.5]).unwrap();
        let b = dos.log_partition(&[0.8]).unwrap();
        let inc = dos.log_partition_increment(&[0.5], &[0.3]).unwrap();
        assert!((b - a - inc).abs() < 1e-12);
    }
}
