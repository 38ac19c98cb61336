//! Fisher information as the covariance of the sufficient statistic.
//!
//! For `f(z) ∝ exp(θᵀΦ(z))` the score is `Φ(z) − E[Φ]`, so the Fisher
//! information equals `cov[Φ]`. Its Monte Carlo estimate is the sample
//! covariance of `Φ` along a chain targeting `f`; the Cramér-Rao bound is
//! the inverse of that matrix.

mod accumulator;
mod ess;

use nalgebra::{DMatrix, SymmetricEigen};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::ExponentialFamily;
use crate::samplers::{run_chain, ChainOutput, ChainSpec};

pub use accumulator::CovAccumulator;
pub use ess::{autocovariance, effective_sample_size, Ess, MAX_ESS_LAG, MIN_ESS_LEN};

#[derive(Debug, Clone, PartialEq)]
pub struct FimEstimate {
    pub matrix: DMatrix<f64>,
    pub n_mc: u64,
    pub ess_per_component: Vec<f64>,
    /// Entrywise heuristic `|I_ij| · sqrt(2 / min(ess_i, ess_j))`.
    pub se_matrix: DMatrix<f64>,
    pub theta: Vec<f64>,
    pub model_descriptor: String,
    /// Set when some statistic component never varied along the chain.
    pub degenerate: bool,
}

impl FimEstimate {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "matrix": matrix_rows(&self.matrix),
            "se_matrix": matrix_rows(&self.se_matrix),
            "n_mc": self.n_mc,
            "ess_per_component": self.ess_per_component,
            "theta": self.theta,
            "model": self.model_descriptor,
            "degenerate": self.degenerate,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    pub crb: DMatrix<f64>,
    pub fim: FimEstimate,
    pub condition_number: f64,
}

impl CrbReport {
    pub fn to_json(&self) -> Value {
        json!({
            "crb": matrix_rows(&self.crb),
            "condition_number": self.condition_number,
            "fim": self.fim.to_json(),
        })
    }
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Turns an accumulator into `Î(θ) = comoment / (count − 1)` with diagnostics.
pub fn finalize_fim(
    acc: &CovAccumulator,
    ess: &[f64],
    theta: &[f64],
    descriptor: &str,
) -> Result<FimEstimate> {
    let d = acc.dim();
    if ess.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: ess.len(),
        });
    }
    let n = acc.count();
    if let Some(bad) = ess.iter().find(|e| !(**e > 0.0 && **e <= n as f64)) {
        return Err(Error::InvalidParameter(format!(
            "effective sample size {bad} outside (0, {n}]"
        )));
    }
    let cov = acc.covariance()?;
    let matrix = DMatrix::from_row_slice(d, d, &cov);
    let se_matrix = DMatrix::from_fn(d, d, |i, j| {
        matrix[(i, j)].abs() * (2.0 / ess[i].min(ess[j])).sqrt()
    });
    let degenerate = (0..d).any(|i| matrix[(i, i)] == 0.0);
    Ok(FimEstimate {
        matrix,
        n_mc: n,
        ess_per_component: ess.to_vec(),
        se_matrix,
        theta: theta.to_vec(),
        model_descriptor: descriptor.to_string(),
        degenerate,
    })
}

/// Inverts a Fisher information estimate.
///
/// Fails when the smallest eigenvalue is below `1e-12` times the largest,
/// which in practice means the chain was too short to span every direction.
pub fn crb_from_fim(fim: &FimEstimate) -> Result<CrbReport> {
    let d = fim.dim();
    let (min_eig, max_eig) = if d == 1 {
        let v = fim.matrix[(0, 0)];
        (v, v)
    } else {
        let eig = SymmetricEigen::new(fim.matrix.clone());
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    };
    if !(max_eig > 0.0) || !(min_eig > 1e-12 * max_eig) {
        return Err(Error::SingularFim {
            eigenvalue: min_eig,
            largest: max_eig,
        });
    }
    let crb = if d == 1 {
        DMatrix::from_element(1, 1, 1.0 / fim.matrix[(0, 0)])
    } else {
        let chol = fim
            .matrix
            .clone()
            .cholesky()
            .ok_or(Error::SingularFim {
                eigenvalue: min_eig,
                largest: max_eig,
            })?;
        let inv = chol.inverse();
        (&inv + inv.transpose()) * 0.5
    };
    Ok(CrbReport {
        crb,
        fim: fim.clone(),
        condition_number: max_eig / min_eig,
    })
}

/// Monte Carlo Fisher information for one chain: samples `Φ` along the
/// chain, accumulates the sample covariance on the fly and attaches the
/// per-component effective sample size.
pub fn monte_carlo_fim<M: ExponentialFamily + ?Sized>(
    model: &M,
    theta: &[f64],
    spec: &ChainSpec,
) -> Result<(FimEstimate, ChainOutput)> {
    let mut acc = CovAccumulator::new(model.stat_dim());
    let chain = run_chain(model, theta, spec, |u| acc.push_unchecked(u))?;
    let ess = chain_ess(&chain)?;
    let fim = finalize_fim(&acc, &ess, theta, &model.describe())?;
    Ok((fim, chain))
}

/// ESS of every statistic component, falling back to `n_mc` for chains
/// too short for the autocorrelation estimator.
pub fn chain_ess(chain: &ChainOutput) -> Result<Vec<f64>> {
    (0..chain.stat_dim())
        .map(|j| {
            let trace = chain.component(j);
            if trace.len() < MIN_ESS_LEN {
                Ok(trace.len() as f64)
            } else {
                effective_sample_size(&trace).map(|e| e.value)
            }
        })
        .collect()
}
