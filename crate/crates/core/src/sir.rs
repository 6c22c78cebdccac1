//! Sampling-importance-resampling filter on a scalar nonlinear switching
//! model, and the resampler comparison built on top of it.
//!
//! State and measurement:
//!
//! ```text
//! x_t = 1 + sin(omega * pi * t) + phi1 * x_{t-1} + u_t,   u_t ~ Gamma(shape, scale)
//! y_t = phi2 * x_t^2 + v_t          if t <= switch_time
//! y_t = phi3 * x_t - 2 + v_t        otherwise,             v_t ~ N(0, obs_noise_std^2)
//! ```
//!
//! The Gamma noise is parametrized by shape and scale, so the default
//! `Gamma(3, 2)` has mean 6.
//!
//! [`run_benchmark`] advances one reference filter per Monte Carlo run and, at
//! every step, hands the identical weighted population to each configured
//! resampler, recording the sampling variance each one achieves.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::resampling::{sampling_variance, Method, ParticleSet, ResampleCounts};
use crate::rng::RngStream;
use crate::weights::WeightVector;

/// Model constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    /// Last step that uses the quadratic measurement.
    pub switch_time: u32,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    pub obs_noise_std: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 0.04,
            phi1: 0.5,
            phi2: 0.2,
            phi3: 0.5,
            switch_time: 30,
            gamma_shape: 3.0,
            gamma_scale: 2.0,
            obs_noise_std: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.gamma_shape > 0.0, "gamma_shape"),
            (self.gamma_scale > 0.0, "gamma_scale"),
            (self.obs_noise_std > 0.0, "obs_noise_std"),
        ];
        for (ok, name) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive",
                });
            }
        }
        if self.switch_time < 1 {
            return Err(Error::InvalidParameter {
                name: "switch_time",
                reason: "must be at least 1",
            });
        }
        let finite = [self.omega, self.phi1, self.phi2, self.phi3];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "model coefficient",
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// One step of the state equation with process noise `u`.
pub fn state_transition(x_prev: f64, t: u32, u: f64, params: &ModelParams) -> f64 {
    1.0 + libm::sin(params.omega * PI * f64::from(t)) + params.phi1 * x_prev + u
}

/// Measurement of state `x` at step `t` with observation noise `v`.
pub fn measurement(x: f64, t: u32, v: f64, params: &ModelParams) -> f64 {
    if t <= params.switch_time {
        params.phi2 * x * x + v
    } else {
        params.phi3 * x - 2.0 + v
    }
}

fn log_likelihood(y_obs: f64, x: f64, t: u32, params: &ModelParams) -> f64 {
    let sigma = params.obs_noise_std;
    let z = (y_obs - measurement(x, t, 0.0, params)) / sigma;
    -0.5 * z * z - libm::log(sigma) - 0.5 * libm::log(2.0 * PI)
}

/// Gaussian density of `y_obs` around the noiseless measurement of `x`.
pub fn likelihood(y_obs: f64, x: f64, t: u32, params: &ModelParams) -> f64 {
    libm::exp(log_likelihood(y_obs, x, t, params))
}

/// Propagates every particle with a fresh process-noise draw and reweights
/// by the likelihood of `y_obs`.
///
/// Weighting happens in the log domain and is normalized against the largest
/// log weight, so far-off observations do not underflow the whole set.
pub fn propagate_and_weight(
    p: &ParticleSet,
    y_obs: f64,
    t: u32,
    rng: &mut RngStream,
    params: &ModelParams,
) -> Result<ParticleSet> {
    let states: Vec<f64> = p
        .states()
        .iter()
        .map(|&x| {
            let noise = rng.next_gamma(params.gamma_shape, params.gamma_scale);
            state_transition(x, t, noise, params)
        })
        .collect();
    let log_weights: Vec<f64> = states
        .iter()
        .zip(p.weights())
        .map(|(&x, &w)| libm::log(w) + log_likelihood(y_obs, x, t, params))
        .collect();

    let collapse = Error::ParticleCollapse { step: t };
    if log_weights.iter().any(|lw| lw.is_nan()) {
        return Err(collapse);
    }
    let peak = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(collapse);
    }
    let masses = log_weights.iter().map(|lw| libm::exp(lw - peak)).collect();
    let weights = WeightVector::normalize(masses).map_err(|_| collapse)?;
    ParticleSet::new(states, weights)
}

/// Result of one filter step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    /// Equally weighted population after resampling.
    pub particles: ParticleSet,
    /// Weighted mean before resampling.
    pub estimate: f64,
    /// Sampling variance of the resample counts against the pre-resampling weights.
    pub sv: f64,
    pub counts: ResampleCounts,
}

/// One full SIR step: propagate, weight, estimate, resample to the same
/// particle count with `method`.
pub fn sir_step(
    p: &ParticleSet,
    y_obs: f64,
    t: u32,
    method: Method,
    rng: &mut RngStream,
    params: &ModelParams,
) -> Result<StepOutput> {
    let weighted = propagate_and_weight(p, y_obs, t, rng, params)?;
    let estimate = weighted.mean();
    let counts = method.resample(&weighted, weighted.len(), rng)?;
    let sv = sampling_variance(&counts, weighted.weights())?;
    let particles = weighted.resampled(&counts)?;
    Ok(StepOutput {
        particles,
        estimate,
        sv,
        counts,
    })
}

/// Monte Carlo experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub num_particles: usize,
    pub num_steps: u32,
    pub num_mc_runs: usize,
    pub seed: u64,
    /// Resamplers compared at every step, in output order.
    pub methods: Vec<Method>,
    /// Resampler that advances the shared population.
    pub reference: Method,
    /// When false the reference filter resamples only at the first step and
    /// carries importance weights forward afterwards.
    pub resample_every_step: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            num_particles: 100,
            num_steps: 60,
            num_mc_runs: 100,
            seed: 0,
            methods: Method::ALL.to_vec(),
            reference: Method::Systematic,
            resample_every_step: true,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |name, reason| Err(Error::InvalidParameter { name, reason });
        if self.num_particles == 0 {
            return fail("num_particles", "must be at least 1");
        }
        if self.num_steps == 0 {
            return fail("num_steps", "must be at least 1");
        }
        if self.num_mc_runs == 0 {
            return fail("num_mc_runs", "must be at least 1");
        }
        if self.methods.is_empty() {
            return fail("methods", "must not be empty");
        }
        Ok(())
    }
}

/// Per-method outcome at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub estimate: f64,
    pub sv: f64,
}

/// One row of the benchmark: a single step of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub run: usize,
    pub t: u32,
    pub x_true: f64,
    pub y_obs: f64,
    /// One entry per configured method, in configuration order.
    pub results: Vec<MethodResult>,
}

/// A simulated ground-truth trajectory and its observations, indexed from
/// step 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<f64>,
    pub observations: Vec<f64>,
}

/// Simulates `steps` steps from `x_0 = 0`.
pub fn simulate(steps: u32, rng: &mut RngStream, params: &ModelParams) -> Trajectory {
    let mut x = 0.0;
    let mut states = Vec::with_capacity(steps as usize);
    let mut observations = Vec::with_capacity(steps as usize);
    for t in 1..=steps {
        let u = rng.next_gamma(params.gamma_shape, params.gamma_scale);
        x = state_transition(x, t, u, params);
        let v = params.obs_noise_std * rng.next_normal();
        states.push(x);
        observations.push(measurement(x, t, v, params));
    }
    Trajectory {
        states,
        observations,
    }
}

/// Per-step view handed to a [`RunObserver`].
pub struct StepView<'a> {
    pub t: u32,
    /// Weighted population before resampling, shared by every method.
    pub population: &'a ParticleSet,
    /// Counts produced by each configured method, in configuration order.
    pub counts: &'a [ResampleCounts],
}

/// Hook for inspecting the shared population at every step.
pub trait RunObserver {
    fn observe(&mut self, step: &StepView<'_>);
}

impl RunObserver for () {
    fn observe(&mut self, _step: &StepView<'_>) {}
}

// Sub-stream indices under a run key.
const TRUTH_STREAM: u64 = 0;
const FILTER_STREAM: u64 = 1;
const METHOD_STREAM_BASE: u64 = 2;

fn method_stream(run_key: u64, t: u32, method: Method) -> RngStream {
    let slot = u64::from(t) * Method::ALL.len() as u64 + method as u64;
    RngStream::derive(run_key, METHOD_STREAM_BASE + slot)
}

/// Runs Monte Carlo run number `run`, reporting collapses as
/// [`Error::ParticleCollapse`].
///
/// The run's randomness depends only on `(config.seed, run)`: the truth, the
/// reference filter and each `(step, method)` comparison draw from separate
/// derived streams, so the reference trajectory does not depend on which
/// methods are compared.
pub fn run_single<O: RunObserver + ?Sized>(
    config: &BenchmarkConfig,
    params: &ModelParams,
    run: usize,
    observer: &mut O,
) -> Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    params.validate()?;
    let run_key = RngStream::derive(config.seed, run as u64).next_u64();
    let truth = simulate(
        config.num_steps,
        &mut RngStream::derive(run_key, TRUTH_STREAM),
        params,
    );
    let mut filter_rng = RngStream::derive(run_key, FILTER_STREAM);
    let initial = (0..config.num_particles)
        .map(|_| filter_rng.next_normal())
        .collect();
    let mut particles = ParticleSet::uniform(initial)?;

    let mut records = Vec::with_capacity(config.num_steps as usize);
    for (t, (&x_true, &y_obs)) in (1..).zip(truth.states.iter().zip(&truth.observations)) {
        let weighted = propagate_and_weight(&particles, y_obs, t, &mut filter_rng, params)?;
        let estimate = weighted.mean();

        let mut all_counts = Vec::with_capacity(config.methods.len());
        let mut results = Vec::with_capacity(config.methods.len());
        for &method in &config.methods {
            let mut rng = method_stream(run_key, t, method);
            let counts = method.resample(&weighted, config.num_particles, &mut rng)?;
            let sv = sampling_variance(&counts, weighted.weights())?;
            results.push(MethodResult {
                method,
                estimate,
                sv,
            });
            all_counts.push(counts);
        }
        observer.observe(&StepView {
            t,
            population: &weighted,
            counts: &all_counts,
        });

        particles = if config.resample_every_step || t == 1 {
            let counts =
                config
                    .reference
                    .resample(&weighted, config.num_particles, &mut filter_rng)?;
            weighted.resampled(&counts)?
        } else {
            weighted
        };

        records.push(BenchmarkRecord {
            run,
            t,
            x_true,
            y_obs,
            results,
        });
    }
    Ok(records)
}

/// Attaches the run index to a collapse error.
pub fn with_run_context(err: Error, run: usize) -> Error {
    match err {
        Error::ParticleCollapse { step } => Error::RunCollapse { run, step },
        other => other,
    }
}

/// Runs every Monte Carlo run in order and concatenates their records.
pub fn run_benchmark(
    config: &BenchmarkConfig,
    params: &ModelParams,
) -> Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    params.validate()?;
    let mut records = Vec::with_capacity(config.num_mc_runs * config.num_steps as usize);
    for run in 0..config.num_mc_runs {
        let run_records =
            run_single(config, params, run, &mut ()).map_err(|e| with_run_context(e, run))?;
        records.extend(run_records);
    }
    Ok(records)
}

/// Mean sampling variance of each method at one step, across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t: u32,
    /// Same order as the configured methods.
    pub mean_sv: Vec<f64>,
    pub runs: usize,
}

/// Averages sampling variance per `(step, method)` over all runs.
pub fn aggregate(
    records: &[BenchmarkRecord],
    methods: &[Method],
    num_steps: u32,
) -> Vec<AggregateRow> {
    let mut rows: Vec<AggregateRow> = (1..=num_steps)
        .map(|t| AggregateRow {
            t,
            mean_sv: alloc::vec![0.0; methods.len()],
            runs: 0,
        })
        .collect();
    for record in records {
        let Some(row) = rows.get_mut(record.t as usize - 1) else {
            continue;
        };
        row.runs += 1;
        for (slot, result) in row.mean_sv.iter_mut().zip(&record.results) {
            *slot += result.sv;
        }
    }
    for row in &mut rows {
        if row.runs > 0 {
            let runs = row.runs as f64;
            row.mean_sv.iter_mut().for_each(|v| *v /= runs);
        }
    }
    rows
}
