use crate::error::{Error, Result};

/// Single-pass mean and co-moment of a vector stream (Welford), mergeable
/// across chains with the pairwise update of Chan, Golub and LeVeque.
#[derive(Debug, Clone, PartialEq)]
pub struct CovAccumulator {
    dim: usize,
    count: u64,
    mean: Vec<f64>,
    /// Sum of centered outer products, row-major `dim x dim`.
    comoment: Vec<f64>,
}

impl CovAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            mean: vec![0.0; dim],
            comoment: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn comoment(&self) -> &[f64] {
        &self.comoment
    }

    pub fn push(&mut self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        self.push_unchecked(u);
        Ok(())
    }

    #[inline]
    pub(crate) fn push_unchecked(&mut self, u: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        let shrink = (n - 1.0) / n;
        let d = self.dim;
        let mut delta = [0.0f64; 8];
        let mut heap;
        let delta: &mut [f64] = if d <= 8 {
            &mut delta[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        for i in 0..d {
            delta[i] = u[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..d {
            for j in 0..=i {
                let v = delta[i] * delta[j] * shrink;
                self.comoment[i * d + j] += v;
                if i != j {
                    self.comoment[j * d + i] += v;
                }
            }
        }
    }

    /// Combines two accumulators as if their streams had been concatenated.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if other.count == 0 {
            return Ok(self.clone());
        }
        if self.count == 0 {
            return Ok(other.clone());
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = self.dim;
        let delta: Vec<f64> = (0..d).map(|i| other.mean[i] - self.mean[i]).collect();
        let mean = (0..d)
            .map(|i| (na * self.mean[i] + nb * other.mean[i]) / n)
            .collect();
        let w = na * nb / n;
        let mut comoment = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let v = self.comoment[i * d + j] + other.comoment[i * d + j] + delta[i] * delta[j] * w;
                comoment[i * d + j] = v;
                comoment[j * d + i] = v;
            }
        }
        Ok(Self {
            dim: d,
            count: self.count + other.count,
            mean,
            comoment,
        })
    }

    /// Sample covariance with the `count − 1` denominator.
    pub fn covariance(&self) -> Result<Vec<f64>> {
        if self.count < 2 {
            return Err(Error::InsufficientSamples {
                got: self.count as usize,
                min: 2,
            });
        }
        let denom = (self.count - 1) as f64;
        Ok(self.comoment.iter().map(|c| c / denom).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stream_has_zero_covariance() {
        let mut acc = CovAccumulator::new(2);
        for _ in 0..3 {
            acc.push(&[1.5, -2.0]).unwrap();
        }
        assert_eq!(acc.covariance().unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn two_point_variance() {
        let mut acc = CovAccumulator::new(1);
        acc.push(&[0.0]).unwrap();
        acc.push(&[1.0]).unwrap();
        assert_eq!(acc.covariance().unwrap(), vec![0.5]);
    }

    #[test]
    fn errors() {
        let mut acc = CovAccumulator::new(2);
        assert!(matches!(
            acc.push(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        acc.push(&[1.0, 2.0]).unwrap();
        assert!(acc.covariance().is_err());
        assert!(acc.merge(&CovAccumulator::new(3)).is_err());
    }

    #[test]
    fn empty_is_merge_identity() {
        let mut acc = CovAccumulator::new(2);
        for t in 0..10 {
            acc.push(&[t as f64, (t * t) as f64]).unwrap();
        }
        let empty = CovAccumulator::new(2);
        assert_eq!(acc.merge(&empty).unwrap(), acc);
        assert_eq!(empty.merge(&acc).unwrap(), acc);
    }

    #[test]
    fn large_dimension_uses_heap_path() {
        let mut acc = CovAccumulator::new(10);
        let u: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let v: Vec<f64> = (0..10).map(|i| -(i as f64)).collect();
        acc.push(&u).unwrap();
        acc.push(&v).unwrap();
        let cov = acc.covariance().unwrap();
        assert_eq!(cov[3 * 10 + 3], 18.0);
        assert_eq!(cov[3 * 10 + 1], 6.0);
    }
}
