//! Least-mean-square-error partitioning of `N` units across `M` weighted bins.
//!
//! [`lmse_partition`] floors every expectation `N * w[m]`, then hands the
//! `N - L` leftover units (where `L` is the sum of the floors) to the bins
//! with the largest fractional residuals. The result is the allocation with
//! the smallest mean square discrepancy from `N * w` among all nonnegative
//! integer allocations summing to `N`.
//!
//! The remaining functions measure and certify allocations: [`mse`] and
//! [`mae`] score them, [`check_unit_bound`] and [`check_local_optimality`]
//! verify the per-bin bound and exchange stability, and
//! [`brute_force_partition`] enumerates every composition for small inputs.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::weights::WeightVector;

/// Upper bound on the number of compositions [`brute_force_partition`] visits.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Slack allowed when comparing mean square errors of neighbouring allocations.
pub const EXCHANGE_TOLERANCE: f64 = 1e-12;

/// Nonnegative integer bin sizes summing to a positive total `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    sizes: Vec<usize>,
    total: usize,
}

impl Allocation {
    /// Wraps sizes whose sum becomes the total. Rejects empty or all-zero input.
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptyWeights);
        }
        let total = sizes.iter().sum();
        if total == 0 {
            return Err(Error::ZeroTotal);
        }
        Ok(Self { sizes, total })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn into_sizes(self) -> Vec<usize> {
        self.sizes
    }

    /// Signed discrepancies `sizes[m] - N * w[m]`.
    pub fn discrepancies(&self, w: &WeightVector) -> Result<Vec<f64>> {
        ensure_same_len(self.len(), w.len())?;
        let n = self.total as f64;
        Ok(self
            .sizes
            .iter()
            .zip(w)
            .map(|(&size, &weight)| size as f64 - n * weight)
            .collect())
    }
}

impl Index<usize> for Allocation {
    type Output = usize;

    fn index(&self, index: usize) -> &usize {
        &self.sizes[index]
    }
}

/// Fractional leftovers `w[m] - floor(N * w[m]) / N`, each in `[0, 1/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    residuals: Vec<f64>,
}

impl ResidualVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// Floor of every expectation together with its fractional part `N*w - floor`.
///
/// Both come from the same double-precision product so they always agree.
pub(crate) fn floors_and_fractions(w: &WeightVector, n: usize) -> (Vec<usize>, Vec<f64>) {
    let scale = n as f64;
    w.iter()
        .map(|&weight| {
            let expected = scale * weight;
            let floor = libm::floor(expected);
            (floor as usize, expected - floor)
        })
        .unzip()
}

/// Partitions `n` units across the bins of `w` with the least mean square error.
///
/// Ties between equal residuals go to the lower index, so the output is
/// reproducible bit for bit. Zero-weight bins never receive a unit.
pub fn lmse_partition(w: &WeightVector, n: usize) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::ZeroTotal);
    }
    let (mut sizes, fractions) = floors_and_fractions(w, n);
    let floor_sum: usize = sizes.iter().sum();
    let surplus = n.saturating_sub(floor_sum);
    debug_assert!(floor_sum <= n, "floors exceed total: {floor_sum} > {n}");

    if surplus > 0 {
        // Descending residual, then ascending index; zero weights rank last.
        let rank = |&a: &usize, &b: &usize| -> Ordering {
            let positive = |i: usize| w[i] > 0.0;
            positive(b)
                .cmp(&positive(a))
                .then_with(|| fractions[b].total_cmp(&fractions[a]))
                .then_with(|| a.cmp(&b))
        };
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        let top = surplus.min(order.len());
        if top < order.len() {
            order.select_nth_unstable_by(top, rank);
        }
        for &index in order.iter().cycle().take(surplus) {
            sizes[index] += 1;
        }
    }

    Ok(Allocation { sizes, total: n })
}

/// Proportion residuals `w[m] - floor(n * w[m]) / n`.
pub fn residuals(w: &WeightVector, n: usize) -> Result<ResidualVector> {
    if n == 0 {
        return Err(Error::ZeroTotal);
    }
    let (floors, _) = floors_and_fractions(w, n);
    let scale = n as f64;
    let residuals = w
        .iter()
        .zip(&floors)
        .map(|(&weight, &floor)| (weight - floor as f64 / scale).max(0.0))
        .collect();
    Ok(ResidualVector { residuals })
}

/// Mean square error `(1/M) * sum (a[m] - N * w[m])^2`.
pub fn mse(a: &Allocation, w: &WeightVector) -> Result<f64> {
    let d = a.discrepancies(w)?;
    Ok(d.iter().map(|x| x * x).sum::<f64>() / d.len() as f64)
}

/// Mean absolute error `(1/M) * sum |a[m] - N * w[m]|`.
pub fn mae(a: &Allocation, w: &WeightVector) -> Result<f64> {
    let d = a.discrepancies(w)?;
    Ok(d.iter().map(|x| x.abs()).sum::<f64>() / d.len() as f64)
}

/// True iff every bin is strictly within one unit of its expectation.
pub fn check_unit_bound(a: &Allocation, w: &WeightVector) -> Result<bool> {
    Ok(a.discrepancies(w)?.iter().all(|d| d.abs() < 1.0))
}

/// True iff no single-unit transfer between two bins lowers the mean square error.
///
/// Every ordered pair `(p, q)` with `a[q] >= 1` is tried by moving one unit
/// from `q` to `p`; the allocation passes when each move leaves the error no
/// lower than [`EXCHANGE_TOLERANCE`] below the current value. Moving `l`
/// units changes `M * mse` by `2l * (l + d[p] - d[q])`, so when one unit does
/// not help, no larger move between the same pair does either.
pub fn check_local_optimality(a: &Allocation, w: &WeightVector) -> Result<bool> {
    let d = a.discrepancies(w)?;
    let m = d.len() as f64;
    for (q, &dq) in d.iter().enumerate() {
        if a[q] == 0 {
            continue;
        }
        for (p, &dp) in d.iter().enumerate() {
            if p == q {
                continue;
            }
            let before = dp * dp + dq * dq;
            let after = (dp + 1.0) * (dp + 1.0) + (dq - 1.0) * (dq - 1.0);
            if (after - before) / m <= -EXCHANGE_TOLERANCE {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of ways to write `n` as an ordered sum of `m` nonnegative integers,
/// saturating at `u128::MAX`.
pub fn composition_count(n: usize, m: usize) -> u128 {
    if m == 0 {
        return u128::from(n == 0);
    }
    // C(n + m - 1, k) with k = min(n, m - 1)
    let top = (n + m - 1) as u128;
    let k = n.min(m - 1) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exhaustively finds an allocation of minimal mean square error.
///
/// Visits every composition of `n` into `w.len()` parts in lexicographic
/// order and keeps the first minimizer. Refuses inputs with more than
/// [`BRUTE_FORCE_LIMIT`] compositions.
pub fn brute_force_partition(w: &WeightVector, n: usize) -> Result<(Allocation, f64)> {
    if n == 0 {
        return Err(Error::ZeroTotal);
    }
    let m = w.len();
    let compositions = composition_count(n, m);
    if compositions > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            compositions,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let expected: Vec<f64> = w.iter().map(|&weight| n as f64 * weight).collect();
    let mut current = vec![0usize; m];
    let mut best = Best {
        sizes: Vec::new(),
        score: f64::INFINITY,
    };
    enumerate(&expected, &mut current, 0, n, &mut best);

    let allocation = Allocation {
        sizes: best.sizes,
        total: n,
    };
    let score = mse(&allocation, w)?;
    Ok((allocation, score))
}

struct Best {
    sizes: Vec<usize>,
    score: f64,
}

fn enumerate(expected: &[f64], current: &mut [usize], bin: usize, left: usize, best: &mut Best) {
    if bin + 1 == current.len() {
        current[bin] = left;
        let score: f64 = current
            .iter()
            .zip(expected)
            .map(|(&c, &e)| (c as f64 - e) * (c as f64 - e))
            .sum();
        if score < best.score {
            best.score = score;
            best.sizes = current.to_vec();
        }
        return;
    }
    for take in 0..=left {
        current[bin] = take;
        enumerate(expected, current, bin + 1, left - take, best);
    }
}

fn ensure_same_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn alloc(sizes: &[usize]) -> Allocation {
        Allocation::new(sizes.to_vec()).unwrap()
    }

    #[test]
    fn partition_examples() {
        let cases: [(&[f64], usize, &[usize]); 4] = [
            (&[0.2, 0.3, 0.5], 10, &[2, 3, 5]),
            (&[0.46, 0.34, 0.20], 5, &[2, 2, 1]),
            (&[1.0], 7, &[7]),
            (&[0.25, 0.25, 0.25, 0.25], 2, &[1, 1, 0, 0]),
        ];
        for (w, n, want) in cases {
            assert_eq!(
                lmse_partition(&wv(w), n).unwrap().sizes(),
                want,
                "{w:?} n={n}"
            );
        }
    }

    #[test]
    fn tied_residuals_share_the_minimum() {
        let w = wv(&[0.25, 0.25, 0.25, 0.25]);
        let got = lmse_partition(&w, 2).unwrap();
        assert_eq!(mse(&got, &w).unwrap(), 0.25);
        let (_, best) = brute_force_partition(&w, 2).unwrap();
        assert_eq!(best, 0.25);
        for other in [[0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]] {
            assert_eq!(mse(&alloc(&other), &w).unwrap(), 0.25);
        }
    }

    #[test]
    fn residual_examples() {
        let r = residuals(&wv(&[0.46, 0.34, 0.20]), 5).unwrap();
        for (got, want) in r.as_slice().iter().zip([0.06, 0.14, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(
            residuals(&wv(&[0.2, 0.3, 0.5]), 10).unwrap().as_slice(),
            &[0.0; 3]
        );
        assert_eq!(residuals(&wv(&[1.0]), 3).unwrap().as_slice(), &[0.0]);
        assert_eq!(residuals(&wv(&[1.0]), 0), Err(Error::ZeroTotal));
    }

    #[test]
    fn mse_and_mae_examples() {
        assert_eq!(mse(&alloc(&[2, 3, 5]), &wv(&[0.2, 0.3, 0.5])).unwrap(), 0.0);
        let v = mse(&alloc(&[2, 2, 1]), &wv(&[0.46, 0.34, 0.20])).unwrap();
        assert!((v - 0.06).abs() < 1e-12);
        assert_eq!(mse(&alloc(&[7]), &wv(&[1.0])).unwrap(), 0.0);

        assert_eq!(mae(&alloc(&[2, 3, 5]), &wv(&[0.2, 0.3, 0.5])).unwrap(), 0.0);
        let v = mae(&alloc(&[2, 2, 1]), &wv(&[0.46, 0.34, 0.20])).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
        assert_eq!(mae(&alloc(&[0, 2]), &wv(&[0.5, 0.5])).unwrap(), 1.0);
    }

    #[test]
    fn metrics_reject_length_mismatch() {
        let err = Error::LengthMismatch {
            expected: 2,
            found: 3,
        };
        assert_eq!(
            mse(&alloc(&[1, 1]), &wv(&[0.2, 0.3, 0.5])),
            Err(err.clone())
        );
        assert_eq!(
            mae(&alloc(&[1, 1]), &wv(&[0.2, 0.3, 0.5])),
            Err(err.clone())
        );
        assert_eq!(
            check_unit_bound(&alloc(&[1, 1]), &wv(&[0.2, 0.3, 0.5])),
            Err(err)
        );
    }

    #[test]
    fn unit_bound_examples() {
        let w = wv(&[0.5, 0.5]);
        assert!(!check_unit_bound(&alloc(&[2, 0]), &w).unwrap());
        assert!(check_unit_bound(&alloc(&[1, 1]), &w).unwrap());
        let w = wv(&[0.46, 0.34, 0.20]);
        assert!(check_unit_bound(&lmse_partition(&w, 5).unwrap(), &w).unwrap());
    }

    #[test]
    fn local_optimality_examples() {
        let w = wv(&[0.46, 0.34, 0.20]);
        assert!(check_local_optimality(&lmse_partition(&w, 5).unwrap(), &w).unwrap());
        assert!(!check_local_optimality(&alloc(&[0, 2]), &wv(&[0.5, 0.5])).unwrap());
        assert!(check_local_optimality(&alloc(&[7]), &wv(&[1.0])).unwrap());
        // Every other composition of 5 has a strictly improving move.
        let (best, _) = brute_force_partition(&w, 5).unwrap();
        for a in 0..=5usize {
            for b in 0..=5 - a {
                let other = alloc(&[a, b, 5 - a - b]);
                if other != best {
                    assert!(!check_local_optimality(&other, &w).unwrap(), "{other:?}");
                }
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let (a, v) = brute_force_partition(&wv(&[0.46, 0.34, 0.20]), 5).unwrap();
        assert_eq!(a.sizes(), &[2, 2, 1]);
        assert!((v - 0.06).abs() < 1e-12);
        let (a, v) = brute_force_partition(&wv(&[0.5, 0.5]), 2).unwrap();
        assert_eq!((a.sizes(), v), (&[1usize, 1][..], 0.0));
        let (a, v) = brute_force_partition(&wv(&[1.0]), 4).unwrap();
        assert_eq!((a.sizes(), v), (&[4usize][..], 0.0));
    }

    #[test]
    fn brute_force_scale_guard() {
        let w = WeightVector::uniform(100).unwrap();
        assert!(matches!(
            brute_force_partition(&w, 100),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
        assert_eq!(composition_count(5, 3), 21);
        assert_eq!(composition_count(12, 5), 1820);
        assert_eq!(composition_count(0, 4), 1);
        assert_eq!(composition_count(4, 1), 1);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            lmse_partition(&wv(&[0.0, 1.0, 0.0]), 9).unwrap().sizes(),
            &[0, 9, 0]
        );
        // Fewer units than positive weights.
        let got = lmse_partition(&wv(&[0.3, 0.3, 0.4]), 1).unwrap();
        assert_eq!(got.sizes(), &[0, 0, 1]);
        assert_eq!(lmse_partition(&wv(&[1.0]), 0), Err(Error::ZeroTotal));
    }

    #[test]
    fn allocation_rejects_empty_and_zero() {
        assert_eq!(Allocation::new(vec![]), Err(Error::EmptyWeights));
        assert_eq!(Allocation::new(vec![0, 0]), Err(Error::ZeroTotal));
    }
}
