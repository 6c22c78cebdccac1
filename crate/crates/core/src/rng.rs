//! Seedable uniform variates.
//!
//! Every random draw in the crate goes through [`UniformSource`]. The project
//! generator, [`RngStream`], is SplitMix64: a 64-bit Weyl counter advanced by
//! `0x9E3779B97F4A7C15` and passed through a fixed bijective mixing
//! permutation. Golden vectors are therefore portable to any other
//! SplitMix64 implementation.

/// A source of uniform variates in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

impl<U: UniformSource + ?Sized> UniformSource for &mut U {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output permutation.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic SplitMix64 stream. Not shareable; derive one per task with
/// [`RngStream::derive`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    state: u64,
    draws: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            state: seed,
            draws: 0,
        }
    }

    /// Independent child stream keyed by `(seed, index)`.
    pub fn derive(seed: u64, index: u64) -> Self {
        Self::new(mix64(
            seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        ))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 64-bit outputs consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        self.draws += 1;
        mix64(self.state)
    }

    /// Standard normal variate by the Box-Muller transform (two uniforms).
    pub fn next_normal(&mut self) -> f64 {
        let radius = 1.0 - self.next_uniform();
        let angle = self.next_uniform();
        libm::sqrt(-2.0 * libm::log(radius)) * libm::cos(core::f64::consts::TAU * angle)
    }

    /// Gamma variate with the given shape and scale (mean `shape * scale`).
    ///
    /// Marsaglia-Tsang squeeze/rejection for `shape >= 1`; smaller shapes are
    /// boosted by one and corrected with `U^(1/shape)`.
    pub fn next_gamma(&mut self, shape: f64, scale: f64) -> f64 {
        debug_assert!(shape > 0.0 && scale > 0.0);
        if shape < 1.0 {
            let boost = libm::pow(1.0 - self.next_uniform(), 1.0 / shape);
            return self.next_gamma(shape + 1.0, scale) * boost;
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / libm::sqrt(9.0 * d);
        loop {
            let (x, v) = loop {
                let x = self.next_normal();
                let v = 1.0 + c * x;
                if v > 0.0 {
                    break (x, v * v * v);
                }
            };
            let u = 1.0 - self.next_uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v))
            {
                return d * v * scale;
            }
        }
    }
}

impl UniformSource for RngStream {
    /// Top 53 bits scaled by `2^-53`.
    fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
