//! Validated proportion vectors.

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// Maximum distance of the raw weight sum from one that is still accepted
/// (and then renormalized away).
pub const SUM_TOLERANCE: f64 = 1e-9;

/// `M >= 1` nonnegative proportions summing to one.
///
/// Construction renormalizes inputs whose sum is within [`SUM_TOLERANCE`] of
/// one, so downstream code can rely on the sum being one up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Validates proportions that should already sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let sum = checked_sum(&weights)?;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::WeightSum {
                sum,
                tolerance: SUM_TOLERANCE,
            });
        }
        Ok(Self::rescaled(weights, sum))
    }

    /// Normalizes arbitrary nonnegative masses by their total.
    ///
    /// Fails with [`Error::WeightSum`] when the total is zero.
    pub fn normalize(masses: Vec<f64>) -> Result<Self> {
        let sum = checked_sum(&masses)?;
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::WeightSum {
                sum,
                tolerance: SUM_TOLERANCE,
            });
        }
        Ok(Self::rescaled(masses, sum))
    }

    /// `M` equal weights of `1/M`.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyWeights);
        }
        Ok(Self {
            weights: alloc::vec![1.0 / len as f64; len],
        })
    }

    fn rescaled(mut weights: Vec<f64>, sum: f64) -> Self {
        if sum != 1.0 {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> core::slice::Iter<'_, f64> {
        self.weights.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    /// Running sums of the weights. Entries from the last positive weight
    /// onward are pinned to exactly 1 so trailing zero-weight entries own an
    /// empty segment.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let last_positive = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        cdf[last_positive..].iter_mut().for_each(|c| *c = 1.0);
        cdf
    }
}

impl Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.weights[index]
    }
}

impl<'a> IntoIterator for &'a WeightVector {
    type Item = &'a f64;
    type IntoIter = core::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.weights.iter()
    }
}

fn checked_sum(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptyWeights);
    }
    let mut sum = 0.0;
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteWeight { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeWeight { index, value });
        }
        sum += value;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn accepts_exact_proportions_unchanged() {
        let w = WeightVector::new(vec![0.46, 0.34, 0.20]).unwrap();
        assert_eq!(w.as_slice(), &[0.46, 0.34, 0.20]);
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let w = WeightVector::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_sum_outside_tolerance() {
        match WeightVector::new(vec![0.5, 0.6]) {
            Err(Error::WeightSum { sum, .. }) => assert!((sum - 1.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn names_offending_index() {
        assert_eq!(
            WeightVector::new(vec![0.5, -0.1, 0.6]),
            Err(Error::NegativeWeight {
                index: 1,
                value: -0.1
            })
        );
        assert!(matches!(
            WeightVector::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFiniteWeight { index: 0, .. })
        ));
        assert_eq!(WeightVector::new(vec![]), Err(Error::EmptyWeights));
    }

    #[test]
    fn normalize_rejects_zero_mass() {
        assert!(matches!(
            WeightVector::normalize(vec![0.0, 0.0]),
            Err(Error::WeightSum { .. })
        ));
        let w = WeightVector::normalize(vec![1.0, 3.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn cumulative_ends_at_one() {
        let w = WeightVector::new(vec![0.1, 0.2, 0.7]).unwrap();
        let cdf = w.cumulative();
        assert_eq!(cdf.len(), 3);
        assert_eq!(cdf[2], 1.0);
        assert!((cdf[1] - 0.3).abs() < 1e-15);

        let trailing = WeightVector::new(vec![0.3, 0.7, 0.0]).unwrap().cumulative();
        assert_eq!(trailing, vec![0.3, 1.0, 1.0]);
    }
}
