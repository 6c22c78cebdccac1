//! Parallel Monte Carlo driver.

use lmse_core::sir::{run_single, with_run_context, BenchmarkConfig, BenchmarkRecord, ModelParams};
use rayon::prelude::*;

/// Same records as [`lmse_core::sir::run_benchmark`], with runs spread over
/// the rayon pool. Each run owns its derived streams, so the output does not
/// depend on scheduling. On collapse the error of the lowest-numbered failing
/// run is returned.
pub fn run_benchmark_parallel(
    config: &BenchmarkConfig,
    params: &ModelParams,
) -> lmse_core::Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    params.validate()?;
    let per_run: Vec<_> = (0..config.num_mc_runs)
        .into_par_iter()
        .map(|run| run_single(config, params, run, &mut ()).map_err(|e| with_run_context(e, run)))
        .collect();
    let mut records = Vec::with_capacity(config.num_mc_runs * config.num_steps as usize);
    for run in per_run {
        records.extend(run?);
    }
    Ok(records)
}
