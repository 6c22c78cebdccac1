//! Resampling of weighted particle sets.
//!
//! Every scheme returns [`ResampleCounts`]: how many times each input particle
//! is replicated in the equally weighted output set. Randomized schemes draw
//! from an explicit [`UniformSource`]; the minimum-sampling-variance scheme
//! ([`msv_resample`]) is deterministic and draws nothing.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::partition::{floors_and_fractions, lmse_partition, mse, Allocation};
use crate::rng::UniformSource;
use crate::weights::WeightVector;

/// Values within this distance of an integer are treated as that integer
/// when counting grid points against cumulative weights. Keeps decimal
/// inputs that land exactly on a segment boundary on the boundary.
const BOUNDARY_SNAP: f64 = 1e-9;

/// Real-valued states with normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    states: Vec<f64>,
    weights: WeightVector,
}

impl ParticleSet {
    pub fn new(states: Vec<f64>, weights: WeightVector) -> Result<Self> {
        if states.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        Ok(Self { states, weights })
    }

    /// Equal weights over `states`.
    pub fn uniform(states: Vec<f64>) -> Result<Self> {
        let weights = WeightVector::uniform(states.len())?;
        Ok(Self { states, weights })
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Weighted mean of the states.
    pub fn mean(&self) -> f64 {
        self.states
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Equally weighted set holding `counts[m]` copies of particle `m`.
    pub fn resampled(&self, counts: &ResampleCounts) -> Result<Self> {
        if counts.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: counts.len(),
            });
        }
        let states = counts
            .expand()
            .into_iter()
            .map(|i| self.states[i])
            .collect();
        Self::uniform(states)
    }
}

/// Replication counts per particle, totalling the requested output size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResampleCounts(Allocation);

impl ResampleCounts {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        Allocation::new(counts).map(Self)
    }

    pub fn counts(&self) -> &[usize] {
        self.0.sizes()
    }

    pub fn total(&self) -> usize {
        self.0.total()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn allocation(&self) -> &Allocation {
        &self.0
    }

    /// Index list with particle `m` repeated `counts[m]` times, ascending.
    pub fn expand(&self) -> Vec<usize> {
        let mut indices = Vec::with_capacity(self.total());
        for (index, &count) in self.counts().iter().enumerate() {
            indices.extend(core::iter::repeat_n(index, count));
        }
        indices
    }
}

impl From<ResampleCounts> for Allocation {
    fn from(counts: ResampleCounts) -> Self {
        counts.0
    }
}

/// The five resampling schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Multinomial,
    Residual,
    Systematic,
    Rsr,
    Msv,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Multinomial,
        Method::Residual,
        Method::Systematic,
        Method::Rsr,
        Method::Msv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Multinomial => "multinomial",
            Method::Residual => "residual",
            Method::Systematic => "systematic",
            Method::Rsr => "rsr",
            Method::Msv => "msv",
        }
    }

    /// Resamples `p` down or up to `n` particles with this scheme.
    pub fn resample<U: UniformSource + ?Sized>(
        self,
        p: &ParticleSet,
        n: usize,
        rng: &mut U,
    ) -> Result<ResampleCounts> {
        match self {
            Method::Multinomial => multinomial_resample(p, n, rng),
            Method::Residual => residual_resample(p, n, rng),
            Method::Systematic => systematic_resample(p, n, rng),
            Method::Rsr => rsr_resample(p, n, rng),
            Method::Msv => msv_resample(p, n),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unknown resampler name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of multinomial, residual, systematic, rsr, msv")
    }
}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> core::result::Result<Self, UnknownMethod> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownMethod)
    }
}

fn ensure_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroTotal)
    } else {
        Ok(())
    }
}

/// Minimum-sampling-variance resampling: the least-mean-square-error
/// partition of `n` over the particle weights. Deterministic.
pub fn msv_resample(p: &ParticleSet, n: usize) -> Result<ResampleCounts> {
    lmse_partition(p.weights(), n).map(ResampleCounts)
}

/// `n` independent inverse-CDF draws. Consumes exactly `n` uniforms.
pub fn multinomial_resample<U: UniformSource + ?Sized>(
    p: &ParticleSet,
    n: usize,
    rng: &mut U,
) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let cdf = p.weights().cumulative();
    let mut counts = alloc::vec![0usize; p.len()];
    for _ in 0..n {
        counts[inverse_cdf(&cdf, rng.next_uniform())] += 1;
    }
    ResampleCounts::new(counts)
}

/// First index whose cumulative weight exceeds `u`.
fn inverse_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Deterministic floors followed by multinomial draws from the normalized
/// fractional residuals. Consumes exactly `n - sum(floor(n * w))` uniforms.
pub fn residual_resample<U: UniformSource + ?Sized>(
    p: &ParticleSet,
    n: usize,
    rng: &mut U,
) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let (mut counts, fractions) = floors_and_fractions(p.weights(), n);
    let floor_sum: usize = counts.iter().sum();
    let remaining = n.saturating_sub(floor_sum);
    if remaining > 0 {
        let residual = WeightVector::normalize(fractions)?;
        let cdf = residual.cumulative();
        for _ in 0..remaining {
            counts[inverse_cdf(&cdf, rng.next_uniform())] += 1;
        }
    }
    ResampleCounts::new(counts)
}

/// Ceiling that treats values within [`BOUNDARY_SNAP`] of an integer as that
/// integer.
fn snapped_ceil(x: f64) -> f64 {
    let nearest = libm::round(x);
    if (x - nearest).abs() <= BOUNDARY_SNAP {
        nearest
    } else {
        libm::ceil(x)
    }
}

/// Systematic resampling: one uniform `u`, grid points `(u + i) / n` for
/// `i = 0..n`, each landing in the cumulative-weight segment that holds it.
/// Consumes exactly one uniform.
pub fn systematic_resample<U: UniformSource + ?Sized>(
    p: &ParticleSet,
    n: usize,
    rng: &mut U,
) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let offset = rng.next_uniform();
    systematic_with_offset(p.weights(), n, offset)
}

/// Systematic resampling for a given offset `u` in `[0, 1)`.
pub fn systematic_with_offset(w: &WeightVector, n: usize, offset: f64) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let scale = n as f64;
    // Points strictly below cumulative weight c: #{i : i < n*c - u}.
    let below = |c: f64| snapped_ceil(scale * c - offset).clamp(0.0, scale) as usize;
    let cdf = w.cumulative();
    let mut counts = Vec::with_capacity(cdf.len());
    let mut previous = 0usize;
    for (m, &c) in cdf.iter().enumerate() {
        let upto = if m + 1 == cdf.len() {
            n
        } else {
            below(c).max(previous)
        };
        counts.push(upto - previous);
        previous = upto;
    }
    ResampleCounts::new(counts)
}

/// Residual systematic resampling. Consumes exactly one uniform.
pub fn rsr_resample<U: UniformSource + ?Sized>(
    p: &ParticleSet,
    n: usize,
    rng: &mut U,
) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let offset = rng.next_uniform();
    rsr_with_offset(p.weights(), n, offset)
}

/// Residual systematic resampling for a given uniform `u` in `[0, 1)`.
///
/// Single sweep with a running fractional carry, kept in units of `1/n`:
/// `count[m] = ceil(n * w[m] - carry)`, `carry += count[m] - n * w[m]`, with
/// the initial carry equal to `u`. Replicates exactly the systematic grid
/// with the same `u`.
pub fn rsr_with_offset(w: &WeightVector, n: usize, offset: f64) -> Result<ResampleCounts> {
    ensure_positive(n)?;
    let scale = n as f64;
    let mut carry = offset;
    let mut assigned = 0usize;
    let mut counts = Vec::with_capacity(w.len());
    let last = w.iter().rposition(|&x| x > 0.0).unwrap_or(0);
    for (m, &weight) in w.iter().enumerate() {
        let count = if m > last || weight == 0.0 {
            0
        } else if m == last {
            n - assigned
        } else {
            let expected = scale * weight;
            let count = (snapped_ceil(expected - carry).max(0.0) as usize).min(n - assigned);
            carry += count as f64 - expected;
            count
        };
        assigned += count;
        counts.push(count);
    }
    ResampleCounts::new(counts)
}

/// Sampling variance of replication counts: the mean square error of the
/// counts against their expectations `n * w`.
pub fn sampling_variance(c: &ResampleCounts, w: &WeightVector) -> Result<f64> {
    mse(c.allocation(), w)
}
