//! Least-mean-square-error integer partitioning and particle resampling.
//!
//! Splitting `N` identical units across `M` bins in proportion to weights
//! `w` cannot hit the expectations `N * w[m]` exactly when they are not
//! integers. [`lmse_partition`] returns the integer allocation with the
//! smallest mean square discrepancy from those expectations. Used as a
//! particle-filter resampler it becomes minimum-sampling-variance resampling
//! ([`msv_resample`]), which is compared here against multinomial, residual,
//! systematic and residual-systematic resampling on a nonlinear filtering
//! benchmark ([`sir`]).
//!
//! The crate is `no_std` and needs only `alloc`. All randomness comes from
//! [`RngStream`], a seeded SplitMix64 generator.
//!
//! ```
//! use lmse_core::{lmse_partition, mse, WeightVector};
//!
//! let w = WeightVector::new(vec![0.46, 0.34, 0.20]).unwrap();
//! let sizes = lmse_partition(&w, 5).unwrap();
//! assert_eq!(sizes.sizes(), &[2, 2, 1]);
//! assert!((mse(&sizes, &w).unwrap() - 0.06).abs() < 1e-12);
//! ```
#![no_std]

extern crate alloc;

pub mod error;
pub mod partition;
pub mod resampling;
pub mod rng;
pub mod sir;
pub mod weights;

pub use error::{Error, Result};
pub use partition::{
    brute_force_partition, check_local_optimality, check_unit_bound, lmse_partition, mae, mse,
    residuals, Allocation, ResidualVector,
};
pub use resampling::{
    msv_resample, multinomial_resample, residual_resample, rsr_resample, sampling_variance,
    systematic_resample, Method, ParticleSet, ResampleCounts,
};
pub use rng::{RngStream, UniformSource};
pub use weights::WeightVector;
